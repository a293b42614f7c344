#include "lungrisk/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lungrisk/csv.hpp"
#include "lungrisk/errors.hpp"

namespace lungrisk::features {

int encode_level(std::string_view label, long row) {
  if (auto level = level_from_name(label)) return level_code(*level);
  std::string msg = "unknown level '" + std::string(label) + "'";
  if (row >= 0) msg += " at row " + std::to_string(row);
  throw ParseError(msg);
}

Level decode_level(int code) {
  if (auto level = level_from_code(code)) return *level;
  throw ParseError("unknown level code " + std::to_string(code));
}

std::size_t FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < column_names.size(); ++i) {
    if (csv::header_equals(column_names[i], name)) return i;
  }
  throw SchemaError("no feature column named '" + std::string(name) + "'");
}

FeatureMatrix to_feature_matrix(const ingest::PatientTable& table) {
  FeatureMatrix fm;
  fm.column_names = table.column_names;
  fm.X = Matrix(table.size(), table.column_names.size());
  fm.y.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& rec = table.rows[i];
    for (std::size_t j = 0; j < rec.values.size(); ++j) {
      if (!rec.values[j]) {
        throw SchemaError("row " + std::to_string(i) + " column '" + table.column_names[j] +
                          "' is missing; impute before building features");
      }
      fm.X(i, j) = *rec.values[j];
    }
    fm.y.push_back(level_code(rec.level));
  }
  return fm;
}

Standardization standardize(const Matrix& X) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (n < 2) throw AnalysisError("standardize needs at least 2 rows");

  Standardization s;
  s.means.assign(d, 0.0);
  s.stds.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += X(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = X(i, j) - mean;
      ss += dev * dev;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    s.means[j] = mean;
    // Relative threshold: a column whose spread is pure rounding noise is constant.
    if (!(sd > 1e-12 * std::max(1.0, std::fabs(mean)))) {
      s.constant_columns.push_back(j);
    } else {
      s.stds[j] = sd;
    }
  }
  s.Z = apply_standardization(X, s.means, s.stds);
  for (auto j : s.constant_columns) {
    for (std::size_t i = 0; i < n; ++i) s.Z(i, j) = 0.0;
  }
  return s;
}

Matrix apply_standardization(const Matrix& X, std::span<const double> means,
                             std::span<const double> stds) {
  Matrix Z(X.rows(), X.cols());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < X.cols(); ++j) Z(i, j) = (X(i, j) - means[j]) / stds[j];
  }
  return Z;
}

FeatureMatrix standardized(const FeatureMatrix& fm) {
  auto s = standardize(fm.X);
  FeatureMatrix out;
  out.column_names = fm.column_names;
  out.X = std::move(s.Z);
  out.y = fm.y;
  out.standardized = true;
  out.means = std::move(s.means);
  out.stds = std::move(s.stds);
  return out;
}

const std::vector<double>& YearJoinedSeries::column(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return columns[k];
  }
  throw SchemaError("no joined series named '" + std::string(name) + "'");
}

namespace {

// Sorted (year, value) pairs; duplicate years rejected.
std::map<int, double> as_map(const YearlySeries& s) {
  if (s.years.size() != s.values.size()) {
    throw AnalysisError("series '" + s.name + "': years and values differ in length");
  }
  std::map<int, double> m;
  for (std::size_t i = 0; i < s.years.size(); ++i) {
    if (!m.emplace(s.years[i], s.values[i]).second) {
      throw AnalysisError("series '" + s.name + "': duplicate year " +
                          std::to_string(s.years[i]));
    }
  }
  return m;
}

double interpolate_at(const std::map<int, double>& m, int year) {
  auto hi = m.lower_bound(year);
  if (hi != m.end() && hi->first == year) return hi->second;
  auto lo = std::prev(hi);
  const double t = static_cast<double>(year - lo->first) / static_cast<double>(hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

}  // namespace

YearJoinedSeries join_by_year(std::span<const YearlySeries> series, JoinOptions options) {
  if (series.size() < 2) throw AnalysisError("join_by_year needs at least two series");
  std::vector<std::map<int, double>> maps;
  for (const auto& s : series) {
    maps.push_back(as_map(s));
    if (maps.back().empty()) throw AnalysisError("series '" + s.name + "' is empty");
  }

  std::vector<int> years;
  if (!options.interpolate) {
    for (const auto& [year, _] : maps.front()) {
      bool everywhere = std::all_of(maps.begin() + 1, maps.end(),
                                    [year](const auto& m) { return m.contains(year); });
      if (everywhere) years.push_back(year);
    }
  } else {
    int lo = maps.front().begin()->first;
    int hi = maps.front().rbegin()->first;
    std::set<int> all;
    for (const auto& m : maps) {
      lo = std::max(lo, m.begin()->first);
      hi = std::min(hi, m.rbegin()->first);
      for (const auto& [year, _] : m) all.insert(year);
    }
    for (int y : all) {
      if (y >= lo && y <= hi) years.push_back(y);
    }
  }
  if (years.empty()) {
    throw AnalysisError(
        "no common years between the series; rerun with --interpolate-years to align "
        "them by linear interpolation");
  }

  YearJoinedSeries out;
  out.years = years;
  for (std::size_t k = 0; k < series.size(); ++k) {
    out.names.push_back(series[k].name);
    std::vector<double> col;
    col.reserve(years.size());
    for (int y : years) col.push_back(interpolate_at(maps[k], y));
    out.columns.push_back(std::move(col));
  }
  return out;
}

}  // namespace lungrisk::features
