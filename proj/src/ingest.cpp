#include "lungrisk/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lungrisk/csv.hpp"
#include "lungrisk/errors.hpp"

namespace lungrisk {

std::optional<Level> level_from_name(std::string_view name) {
  const std::string key = csv::to_lower(csv::trim(name));
  if (key == "low") return Level::Low;
  if (key == "medium") return Level::Medium;
  if (key == "high") return Level::High;
  return std::nullopt;
}

std::optional<Level> level_from_code(int code) {
  if (code < 1 || code > 3) return std::nullopt;
  return static_cast<Level>(code);
}

}  // namespace lungrisk

namespace lungrisk::ingest {
namespace {

std::string source_name(const FileReport* report) {
  return report && !report->name.empty() ? report->name : std::string("<input>");
}

std::string coords(const FileReport* report, std::size_t data_row, std::string_view column) {
  // Row numbers are 1-based file lines counting the header as line 1.
  return source_name(report) + " row " + std::to_string(data_row + 2) + " column '" +
         std::string(column) + "'";
}

void warn(FileReport* report, std::string message) {
  if (report) report->warnings.push_back(std::move(message));
}

// Header key used for matching: trimmed, lower case, runs of '_' collapsed.
std::string header_key(std::string_view raw) {
  std::string lowered = csv::to_lower(csv::trim(raw));
  std::string out;
  for (char c : lowered) {
    if (c == '_' && !out.empty() && out.back() == '_') continue;
    out.push_back(c);
  }
  return out;
}

class HeaderIndex {
 public:
  explicit HeaderIndex(const csv::Row& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      keys_.emplace(header_key(header[i]), i);
    }
  }
  std::optional<std::size_t> find(std::initializer_list<std::string_view> aliases) const {
    for (auto alias : aliases) {
      auto it = keys_.find(header_key(alias));
      if (it != keys_.end()) return it->second;
    }
    return std::nullopt;
  }
  std::size_t require(std::initializer_list<std::string_view> aliases,
                      const FileReport* report) const {
    if (auto idx = find(aliases)) return *idx;
    throw SchemaError(source_name(report) + ": missing required column '" +
                      std::string(*aliases.begin()) + "'");
  }

 private:
  std::map<std::string, std::size_t> keys_;
};

std::vector<csv::Row> parse_with_header(std::string_view text, const FileReport* report) {
  std::vector<csv::Row> rows;
  try {
    rows = csv::parse(text);
  } catch (const ParseError& e) {
    throw ParseError(source_name(report) + ": " + e.what());
  }
  if (rows.empty()) throw SchemaError(source_name(report) + ": no header row");
  return rows;
}

const std::string& cell(const csv::Row& row, std::size_t col) {
  static const std::string empty;
  return col < row.size() ? row[col] : empty;
}

std::optional<double> try_clean_numeric(std::string_view token) {
  std::string cleaned;
  for (char c : csv::trim(token)) {
    if (c != ',') cleaned.push_back(c);
  }
  if (cleaned.empty()) return std::nullopt;
  const char* first = cleaned.data();
  const char* last = cleaned.data() + cleaned.size();
  if (*first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long long> as_integral(double v) {
  if (std::floor(v) != v || std::fabs(v) > 9.0e15) return std::nullopt;
  return static_cast<long long>(v);
}

}  // namespace

std::optional<std::size_t> PatientTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < column_names.size(); ++i) {
    if (csv::header_equals(column_names[i], name)) return i;
  }
  return std::nullopt;
}

std::size_t PatientTable::missing_cells() const {
  std::size_t n = 0;
  for (const auto& r : rows) {
    n += static_cast<std::size_t>(std::count(r.values.begin(), r.values.end(), std::nullopt));
  }
  return n;
}

std::optional<ImputeStrategy> impute_strategy_from_name(std::string_view name) {
  const std::string key = csv::to_lower(csv::trim(name));
  if (key == "median") return ImputeStrategy::Median;
  if (key == "mode") return ImputeStrategy::Mode;
  if (key == "drop_row" || key == "drop-row" || key == "drop") return ImputeStrategy::DropRow;
  return std::nullopt;
}

std::string_view impute_strategy_name(ImputeStrategy s) {
  switch (s) {
    case ImputeStrategy::Median: return "median";
    case ImputeStrategy::Mode: return "mode";
    case ImputeStrategy::DropRow: return "drop_row";
  }
  return "?";
}

double clean_numeric(std::string_view token, std::string_view where) {
  if (csv::trim(token).empty()) {
    throw ParseError(std::string(where) + ": empty numeric cell");
  }
  auto value = try_clean_numeric(token);
  if (!value) {
    throw ParseError(std::string(where) + ": not a number: '" + std::string(token) + "'");
  }
  return *value;
}

int parse_year(std::string_view token, std::string_view where) {
  const double v = clean_numeric(token, where);
  auto year = as_integral(v);
  if (!year) throw ParseError(std::string(where) + ": year is not integral: '" + std::string(token) + "'");
  if (*year < 1900 || *year > 2100) {
    throw SchemaError(std::string(where) + ": year " + std::to_string(*year) +
                      " outside [1900, 2100]");
  }
  return static_cast<int>(*year);
}

PatientTable parse_patient_csv(std::string_view text, FileReport* report) {
  auto rows = parse_with_header(text, report);
  const csv::Row& header = rows.front();
  HeaderIndex index(header);

  const std::size_t level_col = index.require({kLevelColumn}, report);
  const auto id_col = index.find({kPatientIdColumn, "patient_id", "PatientId", "id"});

  PatientTable table;
  std::vector<std::size_t> numeric_cols;
  std::vector<bool> known(header.size(), false);
  known[level_col] = true;
  if (id_col) known[*id_col] = true;
  for (auto name : kPatientNumericColumns) {
    if (auto col = index.find({name})) {
      if (known[*col]) continue;
      known[*col] = true;
      numeric_cols.push_back(*col);
    }
  }
  // Keep the file's column order.
  std::sort(numeric_cols.begin(), numeric_cols.end());
  for (auto col : numeric_cols) table.column_names.push_back(csv::trim(header[col]));
  for (std::size_t col = 0; col < header.size(); ++col) {
    if (!known[col]) {
      warn(report, source_name(report) + ": ignoring column '" + header[col] + "'");
    }
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    const std::size_t data_row = r - 1;
    PatientRecord rec;
    rec.patient_id = id_col ? csv::trim(cell(row, *id_col)) : "P" + std::to_string(r);

    const std::string& level_text = cell(row, level_col);
    auto level = level_from_name(level_text);
    if (!level) {
      throw ParseError(coords(report, data_row, header[level_col]) + ": unknown level '" +
                       level_text + "'");
    }
    rec.level = *level;

    rec.values.reserve(numeric_cols.size());
    for (std::size_t k = 0; k < numeric_cols.size(); ++k) {
      const std::string& token = cell(row, numeric_cols[k]);
      std::optional<int> value;
      if (auto v = try_clean_numeric(token)) {
        auto integral = as_integral(*v);
        if (integral && *integral >= 1 && *integral <= 1'000'000) {
          value = static_cast<int>(*integral);
        }
      }
      if (!value && !csv::trim(token).empty()) {
        warn(report, coords(report, data_row, table.column_names[k]) +
                         ": invalid ordinal '" + token + "', queued for imputation");
      }
      rec.values.push_back(value);
    }
    table.rows.push_back(std::move(rec));
  }

  if (table.rows.empty()) throw SchemaError(source_name(report) + ": table has no data rows");
  if (report) report->rows = table.rows.size();
  return table;
}

std::vector<YearlyIncidence> parse_yearly_incidence(std::string_view text, FileReport* report) {
  auto rows = parse_with_header(text, report);
  HeaderIndex index(rows.front());
  const auto year_col = index.require({"Year"}, report);
  const auto cases_col = index.require({"Number", "Cases"}, report);
  const auto total_col = index.require({"Total"}, report);
  const auto rate_col = index.find({"Rate"});

  std::vector<YearlyIncidence> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t dr = r - 1;
    YearlyIncidence rec;
    rec.year = parse_year(cell(row, year_col), coords(report, dr, "Year"));
    auto cases = as_integral(clean_numeric(cell(row, cases_col), coords(report, dr, "Number")));
    auto total = as_integral(clean_numeric(cell(row, total_col), coords(report, dr, "Total")));
    if (!cases || !total || *cases < 0 || *total < 0) {
      throw ParseError(coords(report, dr, "Number") + ": counts must be non-negative integers");
    }
    if (*total == 0 || *cases > *total) {
      throw SchemaError(coords(report, dr, "Total") + ": need 0 <= cases <= total and total > 0");
    }
    rec.cases = *cases;
    rec.total = *total;
    const double computed = static_cast<double>(rec.cases) / static_cast<double>(rec.total);
    rec.rate = computed;
    if (rate_col && !csv::trim(cell(row, *rate_col)).empty()) {
      const double file_rate = clean_numeric(cell(row, *rate_col), coords(report, dr, "Rate"));
      if (std::fabs(file_rate - computed) <= 1e-4) {
        rec.rate = file_rate;
      } else {
        warn(report, coords(report, dr, "Rate") + ": rate " + format_number(file_rate) +
                         " disagrees with cases/total " + format_number(computed) +
                         ", replaced");
      }
    }
    out.push_back(rec);
  }
  if (report) report->rows = out.size();
  return out;
}

std::vector<ForestStatus> parse_forest_status(std::string_view text, FileReport* report) {
  auto rows = parse_with_header(text, report);
  HeaderIndex index(rows.front());
  const auto year_col = index.require({"Year"}, report);
  const auto total_col = index.require({"Total area of forested land", "Total"}, report);
  const auto natural_col = index.require({"Natural forest", "Natural"}, report);
  const auto planted_col = index.require({"Planted forest", "Planted"}, report);

  std::vector<ForestStatus> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t dr = r - 1;
    ForestStatus rec;
    rec.year = parse_year(cell(row, year_col), coords(report, dr, "Year"));
    rec.total_kha = clean_numeric(cell(row, total_col), coords(report, dr, "Total area of forested land"));
    rec.natural_kha = clean_numeric(cell(row, natural_col), coords(report, dr, "Natural forest"));
    rec.planted_kha = clean_numeric(cell(row, planted_col), coords(report, dr, "Planted forest"));
    if (rec.total_kha < 0 || rec.natural_kha < 0 || rec.planted_kha < 0) {
      throw SchemaError(coords(report, dr, "Total area of forested land") + ": negative area");
    }
    if (std::fabs(rec.total_kha - (rec.natural_kha + rec.planted_kha)) > 0.5) {
      warn(report, coords(report, dr, "Total area of forested land") + ": total " +
                       format_number(rec.total_kha) + " != natural + planted " +
                       format_number(rec.natural_kha + rec.planted_kha));
    }
    out.push_back(rec);
  }
  if (report) report->rows = out.size();
  return out;
}

std::vector<TreeCoverLoss> parse_tree_cover_loss(std::string_view text, std::string_view iso,
                                                 FileReport* report) {
  auto rows = parse_with_header(text, report);
  HeaderIndex index(rows.front());
  const auto iso_col = index.require({"iso"}, report);
  const auto year_col = index.require({"umd_tree_cover_loss_year", "year"}, report);
  const auto loss_col = index.require({"umd_tree_cover_loss_ha", "loss_ha"}, report);
  const auto co2_col =
      index.require({"gfw_gross_emissions_co2e_all_gases_Mg", "co2e_mg"}, report);

  const std::string wanted = csv::to_lower(csv::trim(iso));
  std::vector<TreeCoverLoss> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t dr = r - 1;
    const std::string row_iso = csv::trim(cell(row, iso_col));
    if (csv::to_lower(row_iso) != wanted) continue;
    TreeCoverLoss rec;
    rec.iso = row_iso;
    rec.year = parse_year(cell(row, year_col), coords(report, dr, "umd_tree_cover_loss_year"));
    rec.loss_ha = clean_numeric(cell(row, loss_col), coords(report, dr, "umd_tree_cover_loss_ha"));
    rec.co2e_mg = clean_numeric(cell(row, co2_col),
                                coords(report, dr, "gfw_gross_emissions_co2e_all_gases_Mg"));
    if (rec.loss_ha < 0 || rec.co2e_mg < 0) {
      throw SchemaError(coords(report, dr, "umd_tree_cover_loss_ha") + ": negative value");
    }
    out.push_back(rec);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.year < b.year; });
  std::set<int> duplicates;
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].year == out[i - 1].year) duplicates.insert(out[i].year);
  }
  if (!duplicates.empty()) {
    std::string years;
    for (int y : duplicates) years += (years.empty() ? "" : ", ") + std::to_string(y);
    throw SchemaError(source_name(report) + ": duplicate years for " + std::string(iso) + ": " +
                      years);
  }
  if (report) report->rows = out.size();
  return out;
}

PatientTable impute_missing(const PatientTable& table, ImputeStrategy strategy,
                            FileReport* report) {
  const std::size_t missing = table.missing_cells();
  if (missing == 0) return table;

  PatientTable out;
  out.column_names = table.column_names;
  if (strategy == ImputeStrategy::DropRow) {
    for (const auto& rec : table.rows) {
      if (std::find(rec.values.begin(), rec.values.end(), std::nullopt) == rec.values.end()) {
        out.rows.push_back(rec);
      }
    }
    if (report) {
      report->dropped_rows += table.rows.size() - out.rows.size();
      report->rows = out.rows.size();
    }
    if (out.rows.empty()) {
      throw SchemaError(source_name(report) + ": every row has a missing cell");
    }
    return out;
  }

  out.rows = table.rows;
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    std::vector<int> observed;
    for (const auto& rec : table.rows) {
      if (rec.values[c]) observed.push_back(*rec.values[c]);
    }
    if (observed.size() == table.rows.size()) continue;
    if (observed.empty()) {
      throw SchemaError(source_name(report) + ": column '" + table.column_names[c] +
                        "' has no observed values to impute from");
    }
    std::sort(observed.begin(), observed.end());
    int fill = 0;
    if (strategy == ImputeStrategy::Median) {
      const std::size_t m = observed.size();
      // Twice the median is an integer; (2*median + 1) / 2 rounds half up.
      const long long twice = m % 2 ? 2LL * observed[m / 2]
                                    : static_cast<long long>(observed[m / 2 - 1]) + observed[m / 2];
      fill = static_cast<int>((twice + 1) / 2);
    } else {
      // Mode; ties go to the smallest value.
      int best_count = 0;
      for (std::size_t i = 0; i < observed.size();) {
        std::size_t j = i;
        while (j < observed.size() && observed[j] == observed[i]) ++j;
        if (static_cast<int>(j - i) > best_count) {
          best_count = static_cast<int>(j - i);
          fill = observed[i];
        }
        i = j;
      }
    }
    for (auto& rec : out.rows) {
      if (!rec.values[c]) rec.values[c] = fill;
    }
  }
  if (report) report->imputations += missing;
  return out;
}

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string to_csv(const PatientTable& table) {
  std::ostringstream out;
  csv::Row header{std::string(kPatientIdColumn)};
  header.insert(header.end(), table.column_names.begin(), table.column_names.end());
  header.emplace_back(kLevelColumn);
  out << csv::format_row(header) << '\n';
  for (const auto& rec : table.rows) {
    csv::Row row{rec.patient_id};
    for (const auto& v : rec.values) row.push_back(v ? std::to_string(*v) : std::string());
    row.emplace_back(level_name(rec.level));
    out << csv::format_row(row) << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<YearlyIncidence>& rows) {
  std::ostringstream out;
  out << "Year,Number,Total,Rate\n";
  for (const auto& r : rows) {
    out << r.year << ',' << r.cases << ',' << r.total << ',' << format_number(r.rate) << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<ForestStatus>& rows) {
  std::ostringstream out;
  out << "Year,Total area of forested land,Natural forest,Planted forest\n";
  for (const auto& r : rows) {
    out << r.year << ',' << format_number(r.total_kha) << ',' << format_number(r.natural_kha)
        << ',' << format_number(r.planted_kha) << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<TreeCoverLoss>& rows) {
  std::ostringstream out;
  out << "iso,umd_tree_cover_loss_year,umd_tree_cover_loss_ha,"
         "gfw_gross_emissions_co2e_all_gases_Mg\n";
  for (const auto& r : rows) {
    out << csv::escape(r.iso) << ',' << r.year << ',' << format_number(r.loss_ha) << ','
        << format_number(r.co2e_mg) << '\n';
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace lungrisk::ingest
