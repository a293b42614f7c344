#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "lungrisk/ingest.hpp"

namespace lungrisk::synth {

// Ground truth of the generator. Every patient column is drawn independently:
// ordinal scores uniform on 1..8, Gender uniform on {1, 2}, Age uniform over
// the 5-year band starts 15, 20, ..., 75. The level comes from the latent score
//
//   s = sum_f effect_f * z_f + noise * N(0, 1)
//
// where z_f is the column standardized by its population mean and standard
// deviation, cut at the normal terciles of s: below -0.4307 sd(s) is Low, above
// +0.4307 sd(s) is High, the rest Medium. Columns without an effect carry no
// information about the level.
struct EffectProfile {
  std::map<std::string, double> effects;  // column name -> weight
  double noise = 0.5;
};

// Strong effects on Passive Smoker and Obesity.
EffectProfile planted_profile();
// No effects; the level is pure noise.
EffectProfile null_profile();

// "name=weight,name=weight"; also the keywords "planted" and "none".
EffectProfile parse_profile(std::string_view text);

// Throws AnalysisError when n < 10 or an effect names an unknown column.
ingest::PatientTable generate(std::size_t n, const EffectProfile& profile, std::uint64_t seed);

}  // namespace lungrisk::synth
