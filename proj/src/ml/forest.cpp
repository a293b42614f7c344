#include "lungrisk/ml/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "lungrisk/errors.hpp"
#include "lungrisk/random.hpp"

namespace lungrisk::ml {

ForestModel fit_forest(const Matrix& X, std::span<const int> y, const ForestParams& params,
                       std::vector<std::string> feature_names) {
  if (params.n_trees < 1) throw AnalysisError("fit_forest: n_trees must be >= 1");
  if (X.rows() == 0) throw AnalysisError("fit_forest: empty training set");
  const std::size_t d = X.cols();
  const std::size_t n = X.rows();

  ForestModel model;
  model.seed = params.seed;
  model.bootstrap = params.bootstrap;
  model.max_features = params.max_features == 0
                           ? std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))))
                           : std::min(params.max_features, d);
  model.trees.resize(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    model.tree_seeds.push_back(derive_seed(params.seed, t));
  }

  TreeParams tree_params;
  tree_params.max_depth = params.max_depth;
  tree_params.min_samples_split = params.min_samples_split;
  tree_params.max_features = model.max_features;

  auto train_one = [&](std::size_t t) {
    Rng rng(model.tree_seeds[t]);
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_index(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    model.trees[t] = fit_tree_on(X, y, std::move(rows), tree_params, feature_names, &rng);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(params.threads, static_cast<unsigned>(params.n_trees)));
  if (workers == 1) {
    for (std::size_t t = 0; t < params.n_trees; ++t) train_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t t = next++; t < params.n_trees; t = next++) {
            try {
              train_one(t);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  for (const auto& tree : model.trees) model.n_classes = std::max(model.n_classes, tree.n_classes);
  return model;
}

int ForestModel::predict(std::span<const double> row) const {
  std::vector<std::size_t> votes(static_cast<std::size_t>(std::max(n_classes, 1)), 0);
  for (const auto& tree : trees) ++votes[static_cast<std::size_t>(tree.predict(row) - 1)];
  // max_element returns the first maximum, i.e. the lowest class code.
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin()) + 1;
}

std::vector<int> ForestModel::predict(const Matrix& X) const {
  std::vector<int> out;
  out.reserve(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out.push_back(predict(X.row(i)));
  return out;
}

}  // namespace lungrisk::ml
