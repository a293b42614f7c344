#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lungrisk/matrix.hpp"
#include "lungrisk/ml/tree.hpp"

namespace lungrisk::ml {

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0: floor(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::optional<int> max_depth;
  std::size_t min_samples_split = 2;
  unsigned threads = 1;  // results do not depend on this
};

struct ForestModel {
  std::vector<TreeModel> trees;
  std::vector<std::uint64_t> tree_seeds;  // derive_seed(seed, tree index)
  std::uint64_t seed = 0;
  std::size_t max_features = 0;  // resolved value
  bool bootstrap = true;
  int n_classes = 0;

  // Majority vote; ties go to the lowest class code.
  int predict(std::span<const double> row) const;
  std::vector<int> predict(const Matrix& X) const;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

ForestModel fit_forest(const Matrix& X, std::span<const int> y, const ForestParams& params,
                       std::vector<std::string> feature_names = {});

}  // namespace lungrisk::ml
