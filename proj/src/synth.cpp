#include "lungrisk/synth.hpp"

#include <cmath>
#include <sstream>

#include "lungrisk/csv.hpp"
#include "lungrisk/errors.hpp"
#include "lungrisk/random.hpp"

namespace lungrisk::synth {
namespace {

constexpr double kTercile = 0.430727299295;  // standard normal quantile at 2/3

struct ColumnDomain {
  int lo;
  int hi;
  int step;
};

ColumnDomain domain_of(std::string_view column) {
  if (csv::header_equals(column, ingest::kAgeColumn)) return {15, 75, 5};
  if (csv::header_equals(column, ingest::kGenderColumn)) return {1, 2, 1};
  return {1, 8, 1};
}

// Mean and standard deviation of a discrete uniform over lo, lo+step, ..., hi.
std::pair<double, double> moments(ColumnDomain d) {
  const double m = static_cast<double>((d.hi - d.lo) / d.step + 1);
  const double mean = 0.5 * (d.lo + d.hi);
  const double sd = d.step * std::sqrt((m * m - 1.0) / 12.0);
  return {mean, sd};
}

}  // namespace

EffectProfile planted_profile() {
  EffectProfile p;
  p.effects["Passive Smoker"] = 1.0;
  p.effects["Obesity"] = 1.0;
  return p;
}

EffectProfile null_profile() { return {}; }

EffectProfile parse_profile(std::string_view text) {
  const std::string key = csv::to_lower(csv::trim(text));
  if (key == "planted" || key == "strong") return planted_profile();
  if (key == "none" || key == "null" || key.empty()) return null_profile();
  EffectProfile p;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw AnalysisError("effect '" + item + "' is not name=weight");
    const std::string name = csv::trim(item.substr(0, eq));
    const std::string weight = csv::trim(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      const double w = std::stod(weight, &used);
      if (used != weight.size()) throw std::invalid_argument("trailing");
      p.effects[name] = w;
    } catch (const std::exception&) {
      throw AnalysisError("effect weight for '" + name + "' is not a number: '" + weight + "'");
    }
  }
  return p;
}

ingest::PatientTable generate(std::size_t n, const EffectProfile& profile, std::uint64_t seed) {
  if (n < 10) throw AnalysisError("synth: need at least 10 patients, got " + std::to_string(n));
  const std::size_t d = ingest::kPatientNumericColumns.size();

  std::vector<double> weight(d, 0.0);
  for (const auto& [name, w] : profile.effects) {
    bool found = false;
    for (std::size_t j = 0; j < d; ++j) {
      if (csv::header_equals(ingest::kPatientNumericColumns[j], name)) {
        weight[j] = w;
        found = true;
      }
    }
    if (!found) throw AnalysisError("synth: unknown column '" + name + "' in effect profile");
  }
  double variance = profile.noise * profile.noise;
  for (double w : weight) variance += w * w;
  const double cut = kTercile * std::sqrt(variance);

  ingest::PatientTable table;
  for (auto c : ingest::kPatientNumericColumns) table.column_names.emplace_back(c);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    ingest::PatientRecord rec;
    rec.patient_id = "P" + std::to_string(i + 1);
    double score = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const auto dom = domain_of(ingest::kPatientNumericColumns[j]);
      const int steps = (dom.hi - dom.lo) / dom.step;
      const int value = dom.lo + dom.step * static_cast<int>(rng.uniform_int(0, steps));
      rec.values.emplace_back(value);
      const auto [mean, sd] = moments(dom);
      score += weight[j] * (value - mean) / sd;
    }
    score += profile.noise * rng.normal();
    rec.level = score < -cut ? Level::Low : (score > cut ? Level::High : Level::Medium);
    table.rows.push_back(std::move(rec));
  }
  return table;
}

}  // namespace lungrisk::synth
