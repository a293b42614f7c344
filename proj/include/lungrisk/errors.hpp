#pragma once

#include <stdexcept>
#include <string>

namespace lungrisk {

// Malformed cell or token. Carries file/row/column coordinates when known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Required column missing, empty table, duplicate keys, broken table invariants.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation's precondition does not hold (empty join, too few rows, ...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lungrisk
