#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "lungrisk/errors.hpp"
#include "lungrisk/ml/forest.hpp"
#include "lungrisk/ml/split.hpp"
#include "lungrisk/ml/tree.hpp"
#include "lungrisk/random.hpp"

using namespace lungrisk;
using namespace lungrisk::ml;

namespace {
std::vector<int> canonical_labels() {
  std::vector<int> y;
  y.insert(y.end(), 303, 1);
  y.insert(y.end(), 332, 2);
  y.insert(y.end(), 365, 3);
  return y;
}

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d, int hi) {
  Matrix X(n, d);
  for (auto& v : X.data()) v = static_cast<double>(rng.uniform_int(1, hi));
  return X;
}

void check_gini_never_rises(const TreeModel& tree) {
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) continue;
    const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
    const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
    CHECK(l.samples + r.samples == node.samples);
    const double weighted = (l.gini * static_cast<double>(l.samples) + r.gini * static_cast<double>(r.samples)) /
                            static_cast<double>(node.samples);
    CHECK(weighted <= node.gini + 1e-12);
  }
}
}  // namespace

TEST_CASE("split sizes and partition") {
  const auto y = canonical_labels();
  const auto s = split(y, 0.7, 42);
  CHECK(s.train_indices.size() == 700);
  CHECK(s.test_indices.size() == 300);
  std::vector<std::size_t> all = s.train_indices;
  all.insert(all.end(), s.test_indices.begin(), s.test_indices.end());
  std::ranges::sort(all);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
  CHECK(s.train_counts[0] + s.test_counts[0] == 303);
  CHECK(s.train_counts[1] + s.test_counts[1] == 332);
  CHECK(s.train_counts[2] + s.test_counts[2] == 365);

  const auto again = split(y, 0.7, 42);
  CHECK(again.train_indices == s.train_indices);
  CHECK(again.test_indices == s.test_indices);

  std::set<std::vector<std::size_t>> distinct;
  for (std::uint64_t seed = 0; seed < 100; ++seed) distinct.insert(split(y, 0.7, seed).train_indices);
  CHECK(distinct.size() == 100);

  const auto strat = split(y, 0.7, 42, true);
  CHECK(strat.stratified);
  CHECK(strat.train_counts[0] == 212);
  CHECK(strat.train_counts[1] == 232);
  CHECK(strat.train_counts[2] == 255);  // 0.7 * 365 is just below 255.5 in binary

  const std::vector<int> two{1, 2};
  CHECK_THROWS_AS(split(two, 0.1, 1), AnalysisError);
  CHECK_THROWS_AS(split(y, 1.0, 1), AnalysisError);
}

TEST_CASE("tree on degenerate inputs") {
  const Matrix X = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const std::vector<int> same{2, 2, 2};
  const auto leaf = fit_tree(X, same);
  REQUIRE(leaf.nodes.size() == 1);
  CHECK(leaf.nodes[0].gini == 0.0);
  CHECK(leaf.depth() == 0);
  CHECK(leaf.predict(std::vector<double>{100, -100}) == 2);

  const Matrix dup = Matrix::from_rows({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  const std::vector<int> mixed{3, 1, 3, 1};
  const auto tie = fit_tree(dup, mixed);
  CHECK(tie.nodes.size() == 1);
  CHECK(tie.nodes[0].prediction == 1);

  const auto split_on_second = fit_tree(Matrix::from_rows({{1, 1}, {1, 2}}), std::vector<int>{1, 2});
  CHECK_THROWS_AS(split_on_second.predict(std::vector<double>{1.0}), AnalysisError);
  CHECK_THROWS_AS(split_on_second.predict(std::vector<double>{1.0, std::nan("")}), AnalysisError);
}

TEST_CASE("XOR needs depth two") {
  const Matrix X = Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const std::vector<int> y{1, 2, 2, 1};
  const auto tree = fit_tree(X, y, {}, {"a", "b"});
  CHECK(tree.depth() == 2);
  CHECK(tree.leaf_count() == 4);
  CHECK(tree.predict(X) == y);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == 0.5);
  const auto stump = fit_tree(X, y, {.max_depth = 1});
  CHECK(stump.depth() == 1);
}

TEST_CASE("purity-grown trees fit distinct rows exactly") {
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(60), d = 1 + rng.uniform_index(5);
    Matrix X(n, d);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      X(i, 0) = static_cast<double>(i);  // distinct rows
      for (std::size_t j = 1; j < d; ++j) X(i, j) = static_cast<double>(rng.uniform_int(1, 4));
      y[i] = static_cast<int>(rng.uniform_int(1, 3));
    }
    const auto tree = fit_tree(X, y);
    CHECK(tree.predict(X) == y);
    check_gini_never_rises(tree);
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        CHECK(node.gini == 0.0);
      } else {
        // Midpoint of two observed values in that column.
        bool midpoint = false;
        for (std::size_t a = 0; a < n && !midpoint; ++a)
          for (std::size_t b = 0; b < n && !midpoint; ++b)
            midpoint = X(a, node.feature) < X(b, node.feature) &&
                       node.threshold == (X(a, node.feature) + X(b, node.feature)) / 2.0;
        CHECK(midpoint);
      }
    }
  }
}

TEST_CASE("gini impurity") {
  CHECK(gini_impurity(std::vector<std::size_t>{5, 0, 0}) == 0.0);
  CHECK(gini_impurity(std::vector<std::size_t>{1, 1}) == 0.5);
  CHECK(gini_impurity(std::vector<std::size_t>{1, 1, 1}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("degenerate forest equals a single tree") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix X = random_matrix(rng, 40, 4, 6);
    std::vector<int> y(40);
    for (auto& v : y) v = static_cast<int>(rng.uniform_int(1, 3));
    const auto tree = fit_tree(X, y);
    const auto forest = fit_forest(X, y, {.n_trees = 1, .max_features = 4, .bootstrap = false, .seed = 9});
    CHECK(forest.trees.front().nodes == tree.nodes);
    const Matrix probe = random_matrix(rng, 200, 4, 7);
    CHECK(forest.predict(probe) == tree.predict(probe));
  }
}

TEST_CASE("forest determinism and threading") {
  Rng rng(8);
  const Matrix X = random_matrix(rng, 120, 6, 8);
  std::vector<int> y(120);
  for (std::size_t i = 0; i < 120; ++i) y[i] = X(i, 2) + X(i, 4) > 9 ? 3 : (X(i, 0) > 4 ? 2 : 1);
  const ForestParams p{.n_trees = 25, .seed = 77};
  const auto a = fit_forest(X, y, p);
  const auto b = fit_forest(X, y, p);
  auto threaded = p;
  threaded.threads = 4;
  const auto c = fit_forest(X, y, threaded);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.max_features == 2);
  CHECK(a.trees.size() == 25);
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    CHECK(a.tree_seeds[t] == derive_seed(77, t));
    CHECK(a.trees[t].nodes[0].samples == 120);
  }
  auto other = p;
  other.seed = 78;
  CHECK_FALSE(fit_forest(X, y, other) == a);
  CHECK_THROWS_AS(fit_forest(X, y, {.n_trees = 0}), AnalysisError);
}
