#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lungrisk/level.hpp"

namespace lungrisk::ml {

struct SplitResult {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
  bool stratified = false;
  // Indexed by level code - 1.
  std::array<std::size_t, kNumLevels> train_counts{};
  std::array<std::size_t, kNumLevels> test_counts{};
};

// Seeded shuffle, first round(ratio * n) indices to train. With stratified
// set, each class is shuffled and cut separately instead. Labels are level
// codes 1..3. Throws AnalysisError when either side would be empty.
SplitResult split(std::span<const int> labels, double ratio, std::uint64_t seed,
                  bool stratified = false);

}  // namespace lungrisk::ml
