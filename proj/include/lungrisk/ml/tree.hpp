#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lungrisk/matrix.hpp"
#include "lungrisk/random.hpp"

namespace lungrisk::ml {

// Node of a fitted CART tree. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;  // rows with x[feature] <= threshold go left
  int left = -1;
  int right = -1;
  double gini = 0.0;
  std::size_t samples = 0;
  std::vector<std::size_t> class_histogram;  // index = class code - 1
  int prediction = 1;                        // majority class, lowest code on ties
  int depth = 0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeParams {
  std::optional<int> max_depth;  // unlimited when empty
  std::size_t min_samples_split = 2;
  // Features examined per split; 0 or >= d means all of them.
  std::size_t max_features = 0;
};

struct TreeModel {
  std::vector<std::string> feature_names;
  std::size_t n_features = 0;
  int n_classes = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  // Throws AnalysisError when the row is too short or holds NaN.
  int predict(std::span<const double> row) const;
  std::vector<int> predict(const Matrix& X) const;
  int depth() const;
  std::size_t leaf_count() const;

  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

// CART with Gini impurity. Labels are class codes 1..K. Candidate thresholds
// are midpoints of adjacent distinct values; ties on impurity go to the
// lowest feature index, then the lowest threshold. `rng` is only used when
// max_features selects a strict subset of the features.
TreeModel fit_tree(const Matrix& X, std::span<const int> y, const TreeParams& params = {},
                   std::vector<std::string> feature_names = {}, Rng* rng = nullptr);

// Same, restricted to the given rows (duplicates allowed, as in a bootstrap sample).
TreeModel fit_tree_on(const Matrix& X, std::span<const int> y, std::vector<std::size_t> rows,
                      const TreeParams& params, std::vector<std::string> feature_names,
                      Rng* rng);

// Gini impurity 1 - sum p_c^2 of a class histogram.
double gini_impurity(std::span<const std::size_t> histogram);

}  // namespace lungrisk::ml
