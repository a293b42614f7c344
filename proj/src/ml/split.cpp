#include "lungrisk/ml/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lungrisk/errors.hpp"
#include "lungrisk/random.hpp"

namespace lungrisk::ml {

SplitResult split(std::span<const int> labels, double ratio, std::uint64_t seed,
                  bool stratified) {
  const std::size_t n = labels.size();
  if (!(ratio > 0.0 && ratio < 1.0)) throw AnalysisError("split ratio must be in (0, 1)");
  if (n < 2) throw AnalysisError("split needs at least 2 rows");
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw AnalysisError("split ratio " + std::to_string(ratio) + " leaves one side empty");
  }

  SplitResult out;
  out.seed = seed;
  out.stratified = stratified;
  Rng rng(seed);
  if (!stratified) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    out.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  } else {
    for (Level level : kAllLevels) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == level_code(level)) members.push_back(i);
      }
      rng.shuffle(members);
      const auto k = static_cast<std::size_t>(
          std::llround(ratio * static_cast<double>(members.size())));
      out.train_indices.insert(out.train_indices.end(), members.begin(),
                               members.begin() + static_cast<std::ptrdiff_t>(k));
      out.test_indices.insert(out.test_indices.end(),
                              members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
    }
    if (out.train_indices.empty() || out.test_indices.empty()) {
      throw AnalysisError("stratified split leaves one side empty");
    }
  }
  for (auto i : out.train_indices) {
    if (labels[i] >= 1 && labels[i] <= kNumLevels) ++out.train_counts[labels[i] - 1];
  }
  for (auto i : out.test_indices) {
    if (labels[i] >= 1 && labels[i] <= kNumLevels) ++out.test_counts[labels[i] - 1];
  }
  return out;
}

}  // namespace lungrisk::ml
