#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lungrisk::csv {

using Row = std::vector<std::string>;

// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
// CRLF or LF line endings, embedded newlines inside quotes. A UTF-8 BOM at
// the start of the buffer is skipped. Blank lines are dropped.
std::vector<Row> parse(std::string_view text);
std::vector<Row> parse(std::istream& in);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const Row& row);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Trimmed, case-insensitive equality, as used for header matching.
bool header_equals(std::string_view a, std::string_view b);

}  // namespace lungrisk::csv
