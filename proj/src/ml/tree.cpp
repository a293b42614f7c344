#include "lungrisk/ml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lungrisk/errors.hpp"

namespace lungrisk::ml {
namespace {

using Histogram = std::vector<std::size_t>;

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  // Split quality as the exact fraction num/den of sum_child(sum_c n_c^2 / n_child);
  // larger is purer.
  __int128 num = 0;
  __int128 den = 1;
};

bool better(const Candidate& a, const Candidate& b) {
  if (b.feature < 0) return a.feature >= 0;
  return a.num * b.den > b.num * a.den;
}

int majority(const Histogram& h) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < h.size(); ++c) {
    if (h[c] > h[best]) best = c;
  }
  return static_cast<int>(best) + 1;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const int> y, const TreeParams& params, int n_classes,
              Rng* rng)
      : X_(X), y_(y), params_(params), n_classes_(n_classes), rng_(rng) {}

  int build(std::vector<std::size_t>& rows, int depth, std::vector<TreeNode>& nodes) {
    Histogram hist(static_cast<std::size_t>(n_classes_), 0);
    for (auto r : rows) ++hist[static_cast<std::size_t>(y_[r] - 1)];

    const int id = static_cast<int>(nodes.size());
    nodes.push_back({});
    {
      TreeNode& node = nodes.back();
      node.samples = rows.size();
      node.gini = gini_impurity(hist);
      node.prediction = majority(hist);
      node.depth = depth;
      node.class_histogram = hist;
    }

    const bool pure = std::count_if(hist.begin(), hist.end(), [](auto c) { return c > 0; }) <= 1;
    const bool depth_capped = params_.max_depth && depth >= *params_.max_depth;
    if (pure || depth_capped || rows.size() < std::max<std::size_t>(2, params_.min_samples_split)) {
      return id;
    }

    const Candidate best = find_split(rows);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      (X_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int l = build(left, depth + 1, nodes);
    const int r = build(right, depth + 1, nodes);
    TreeNode& node = nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

 private:
  Candidate find_split(const std::vector<std::size_t>& rows) {
    const std::size_t d = X_.cols();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), std::size_t{0});

    if (params_.max_features > 0 && params_.max_features < d && rng_) {
      // Partial Fisher-Yates: the first max_features entries are the sample.
      for (std::size_t i = 0; i < params_.max_features; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng_->uniform_index(d - i));
        std::swap(features[i], features[j]);
      }
      std::vector<std::size_t> drawn(features.begin(),
                                     features.begin() + static_cast<std::ptrdiff_t>(params_.max_features));
      std::vector<std::size_t> rest(features.begin() + static_cast<std::ptrdiff_t>(params_.max_features),
                                    features.end());
      std::sort(drawn.begin(), drawn.end());
      std::sort(rest.begin(), rest.end());
      Candidate best = best_over(rows, drawn);
      // No drawn feature can separate these rows; fall back to the others.
      if (best.feature < 0) best = best_over(rows, rest);
      return best;
    }
    return best_over(rows, features);
  }

  Candidate best_over(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& features) {
    Candidate best;
    std::vector<std::size_t> order(rows);
    Histogram left(static_cast<std::size_t>(n_classes_));
    Histogram right(static_cast<std::size_t>(n_classes_));
    for (auto f : features) {
      std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        const double va = X_(a, f), vb = X_(b, f);
        return va < vb || (va == vb && a < b);
      });
      std::fill(left.begin(), left.end(), 0);
      std::fill(right.begin(), right.end(), 0);
      for (auto r : order) ++right[static_cast<std::size_t>(y_[r] - 1)];

      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto cls = static_cast<std::size_t>(y_[order[i]] - 1);
        ++left[cls];
        --right[cls];
        const double here = X_(order[i], f);
        const double next = X_(order[i + 1], f);
        if (here == next) continue;

        const auto n_left = static_cast<__int128>(i + 1);
        const auto n_right = static_cast<__int128>(order.size() - i - 1);
        __int128 sq_left = 0, sq_right = 0;
        for (int c = 0; c < n_classes_; ++c) {
          sq_left += static_cast<__int128>(left[static_cast<std::size_t>(c)]) * left[static_cast<std::size_t>(c)];
          sq_right += static_cast<__int128>(right[static_cast<std::size_t>(c)]) * right[static_cast<std::size_t>(c)];
        }
        Candidate cand;
        cand.feature = static_cast<int>(f);
        cand.threshold = here + (next - here) / 2.0;
        cand.num = sq_left * n_right + sq_right * n_left;
        cand.den = n_left * n_right;
        if (better(cand, best)) best = cand;
      }
    }
    return best;
  }

  const Matrix& X_;
  std::span<const int> y_;
  const TreeParams& params_;
  int n_classes_;
  Rng* rng_;
};

}  // namespace

double gini_impurity(std::span<const std::size_t> histogram) {
  const double n = static_cast<double>(std::accumulate(histogram.begin(), histogram.end(), std::size_t{0}));
  if (n == 0.0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : histogram) sum_sq += (static_cast<double>(c) / n) * (static_cast<double>(c) / n);
  return std::max(0.0, 1.0 - sum_sq);
}

TreeModel fit_tree_on(const Matrix& X, std::span<const int> y, std::vector<std::size_t> rows,
                      const TreeParams& params, std::vector<std::string> feature_names, Rng* rng) {
  if (X.rows() != y.size()) throw AnalysisError("fit_tree: X and y differ in length");
  if (rows.empty()) throw AnalysisError("fit_tree: empty training set");
  int n_classes = 0;
  for (auto r : rows) {
    if (y[r] < 1) throw AnalysisError("fit_tree: class codes must be >= 1");
    n_classes = std::max(n_classes, y[r]);
  }
  if (!feature_names.empty() && feature_names.size() != X.cols()) {
    throw AnalysisError("fit_tree: feature name count does not match columns");
  }
  for (auto r : rows) {
    for (double v : X.row(r)) {
      if (!std::isfinite(v)) throw AnalysisError("fit_tree: non-finite feature value");
    }
  }

  TreeModel model;
  model.feature_names = std::move(feature_names);
  model.n_features = X.cols();
  model.n_classes = n_classes;
  TreeBuilder builder(X, y, params, n_classes, rng);
  builder.build(rows, 0, model.nodes);
  return model;
}

TreeModel fit_tree(const Matrix& X, std::span<const int> y, const TreeParams& params,
                   std::vector<std::string> feature_names, Rng* rng) {
  std::vector<std::size_t> rows(X.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_tree_on(X, y, std::move(rows), params, std::move(feature_names), rng);
}

int TreeModel::predict(std::span<const double> row) const {
  if (nodes.empty()) throw AnalysisError("predict: empty tree");
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const auto f = static_cast<std::size_t>(nodes[at].feature);
    if (f >= row.size() || std::isnan(row[f])) {
      const std::string name = f < feature_names.size() ? feature_names[f] : std::to_string(f);
      throw AnalysisError("predict: missing value for feature '" + name + "'");
    }
    at = static_cast<std::size_t>(row[f] <= nodes[at].threshold ? nodes[at].left : nodes[at].right);
  }
  return nodes[at].prediction;
}

std::vector<int> TreeModel::predict(const Matrix& X) const {
  std::vector<int> out;
  out.reserve(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out.push_back(predict(X.row(i)));
  return out;
}

int TreeModel::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_leaf(); }));
}

}  // namespace lungrisk::ml
