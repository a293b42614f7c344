#include <set>

#include "doctest.h"
#include "lungrisk/errors.hpp"
#include "lungrisk/features.hpp"
#include "lungrisk/ingest.hpp"
#include "lungrisk/stats.hpp"
#include "lungrisk/synth.hpp"

using namespace lungrisk;

TEST_CASE("generator output matches the patient schema") {
  const auto t = synth::generate(300, synth::planted_profile(), 1);
  CHECK(t.size() == 300);
  CHECK(t.column_names == std::vector<std::string>(ingest::kPatientNumericColumns.begin(),
                                                   ingest::kPatientNumericColumns.end()));
  CHECK(t.missing_cells() == 0);
  std::set<Level> levels;
  for (const auto& r : t.rows) levels.insert(r.level);
  CHECK(levels.size() == 3);
  CHECK(ingest::parse_patient_csv(ingest::to_csv(t)) == t);
}

TEST_CASE("fixed seed gives identical bytes") {
  const auto a = ingest::to_csv(synth::generate(100, synth::planted_profile(), 9));
  CHECK(a == ingest::to_csv(synth::generate(100, synth::planted_profile(), 9)));
  CHECK(a != ingest::to_csv(synth::generate(100, synth::planted_profile(), 10)));
}

TEST_CASE("profiles") {
  CHECK(synth::parse_profile("planted").effects == synth::planted_profile().effects);
  CHECK(synth::parse_profile("none").effects.empty());
  const auto custom = synth::parse_profile("Smoking=2, Fatigue=0.5");
  CHECK(custom.effects.at("Smoking") == 2.0);
  CHECK(custom.effects.at("Fatigue") == 0.5);
  CHECK_THROWS_AS(synth::parse_profile("Smoking"), AnalysisError);
  CHECK_THROWS_AS(synth::generate(100, synth::parse_profile("Nonsense=1"), 1), AnalysisError);
  CHECK_THROWS_AS(synth::generate(9, synth::null_profile(), 1), AnalysisError);
}

TEST_CASE("planted effects surface in information gain") {
  const auto fm = features::to_feature_matrix(synth::generate(1000, synth::parse_profile("Smoking=1"), 4));
  CHECK(stats::rank_features(fm).front().name == "Smoking");
}
