#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lungrisk/ingest.hpp"
#include "lungrisk/matrix.hpp"

namespace lungrisk::features {

// Low -> 1, Medium -> 2, High -> 3, case-insensitive. Throws ParseError
// naming the value (and the row, when row >= 0).
int encode_level(std::string_view label, long row = -1);
Level decode_level(int code);

struct FeatureMatrix {
  std::vector<std::string> column_names;
  Matrix X;
  std::vector<int> y;  // encoded levels
  bool standardized = false;
  std::vector<double> means;
  std::vector<double> stds;

  std::size_t rows() const noexcept { return X.rows(); }
  std::size_t cols() const noexcept { return X.cols(); }
  std::size_t column_index(std::string_view name) const;  // throws SchemaError
};

// Raw integer-valued features. The table must be fully imputed.
FeatureMatrix to_feature_matrix(const ingest::PatientTable& table);

struct Standardization {
  Matrix Z;
  std::vector<double> means;
  std::vector<double> stds;  // 1.0 recorded for constant columns
  std::vector<std::size_t> constant_columns;
};

// Column z-scores with the sample (n-1) standard deviation. Constant columns
// map to 0 and are listed in constant_columns. Requires n >= 2.
Standardization standardize(const Matrix& X);

// Applies stored statistics to new rows.
Matrix apply_standardization(const Matrix& X, std::span<const double> means,
                             std::span<const double> stds);

FeatureMatrix standardized(const FeatureMatrix& fm);

struct YearlySeries {
  std::string name;
  std::vector<int> years;
  std::vector<double> values;
};

struct YearJoinedSeries {
  std::vector<int> years;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // columns[k] aligned with years

  const std::vector<double>& column(std::string_view name) const;
};

struct JoinOptions {
  // Off: inner join on year. On: every year of any input inside the range
  // covered by all inputs, with each series linearly interpolated there.
  bool interpolate = false;
};

// Throws AnalysisError on fewer than two inputs or an empty result.
YearJoinedSeries join_by_year(std::span<const YearlySeries> series, JoinOptions options = {});

}  // namespace lungrisk::features
