#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lungrisk/level.hpp"

namespace lungrisk::ingest {

// Patient table columns in the order of the public dataset. Matching against
// file headers is trimmed and case-insensitive.
inline constexpr std::string_view kPatientIdColumn = "Patient Id";
inline constexpr std::string_view kLevelColumn = "Level";
inline constexpr std::string_view kAgeColumn = "Age";
inline constexpr std::string_view kGenderColumn = "Gender";
inline constexpr std::array<std::string_view, 23> kPatientNumericColumns = {
    "Age",
    "Gender",
    "Air Pollution",
    "Alcohol use",
    "Dust Allergy",
    "Occupational Hazards",
    "Genetic Risk",
    "chronic Lung Disease",
    "Balanced Diet",
    "Obesity",
    "Smoking",
    "Passive Smoker",
    "Chest Pain",
    "Coughing of Blood",
    "Fatigue",
    "Weight Loss",
    "Shortness of Breath",
    "Wheezing",
    "Swallowing Difficulty",
    "Clubbing of Finger Nails",
    "Frequent Cold",
    "Dry Cough",
    "Snoring",
};

struct PatientRecord {
  std::string patient_id;
  // Aligned with PatientTable::column_names. nullopt marks a missing or
  // unparseable cell waiting for imputation.
  std::vector<std::optional<int>> values;
  Level level = Level::Low;

  friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

struct PatientTable {
  // Numeric columns only, spelled as in the source header.
  std::vector<std::string> column_names;
  std::vector<PatientRecord> rows;

  std::size_t size() const noexcept { return rows.size(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
  std::size_t missing_cells() const;

  friend bool operator==(const PatientTable&, const PatientTable&) = default;
};

struct YearlyIncidence {
  int year = 0;
  long long cases = 0;
  long long total = 0;
  double rate = 0.0;
  friend bool operator==(const YearlyIncidence&, const YearlyIncidence&) = default;
};

struct ForestStatus {
  int year = 0;
  double total_kha = 0.0;
  double natural_kha = 0.0;
  double planted_kha = 0.0;
  friend bool operator==(const ForestStatus&, const ForestStatus&) = default;
};

struct TreeCoverLoss {
  std::string iso;
  int year = 0;
  double loss_ha = 0.0;
  double co2e_mg = 0.0;
  friend bool operator==(const TreeCoverLoss&, const TreeCoverLoss&) = default;
};

struct FileReport {
  std::string name;
  std::size_t rows = 0;
  std::size_t imputations = 0;
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;
};

struct LoadReport {
  std::vector<FileReport> files;
};

enum class ImputeStrategy { Median, Mode, DropRow };

std::optional<ImputeStrategy> impute_strategy_from_name(std::string_view name);
std::string_view impute_strategy_name(ImputeStrategy s);

// Strips comma thousands separators and parses a decimal number.
// Throws ParseError naming `where` on empty input or non-numeric residue.
double clean_numeric(std::string_view token, std::string_view where = "value");

// Year cell, accepting integral decimals such as "2002.0".
int parse_year(std::string_view token, std::string_view where = "year");

// Every parser records row counts and warnings into `report` when given.
// Schema problems throw SchemaError; malformed numeric cells that cannot be
// imputed throw ParseError. Both messages carry file/row/column coordinates.
PatientTable parse_patient_csv(std::string_view text, FileReport* report = nullptr);
std::vector<YearlyIncidence> parse_yearly_incidence(std::string_view text,
                                                    FileReport* report = nullptr);
std::vector<ForestStatus> parse_forest_status(std::string_view text,
                                              FileReport* report = nullptr);
std::vector<TreeCoverLoss> parse_tree_cover_loss(std::string_view text,
                                                 std::string_view iso = "VNM",
                                                 FileReport* report = nullptr);

// Fills every missing cell (median and mode strategies round half up to
// stay on the integer scale) or drops defective rows. Throws SchemaError
// when a column has no observed value at all.
PatientTable impute_missing(const PatientTable& table,
                            ImputeStrategy strategy = ImputeStrategy::Median,
                            FileReport* report = nullptr);

// Canonical CSV forms, re-parseable by the matching parser.
std::string to_csv(const PatientTable& table);
std::string to_csv(const std::vector<YearlyIncidence>& rows);
std::string to_csv(const std::vector<ForestStatus>& rows);
std::string to_csv(const std::vector<TreeCoverLoss>& rows);

// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);

std::string read_file(const std::filesystem::path& path);

}  // namespace lungrisk::ingest
