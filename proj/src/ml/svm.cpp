#include "lungrisk/ml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "lungrisk/errors.hpp"
#include "lungrisk/random.hpp"

namespace lungrisk::ml {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct BinaryFit {
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> history;
};

BinaryFit fit_binary(const Matrix& X, std::span<const int> signs, const SvmParams& params,
                     std::uint64_t seed) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  const double lambda = 1.0 / (params.C * static_cast<double>(n));

  BinaryFit fit;
  fit.w.assign(d, 0.0);
  double objective = svm_objective(fit.w, fit.b, X, signs, lambda);
  fit.history.push_back(objective);

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  double base_step = params.learning_rate;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    const double step = base_step / std::sqrt(1.0 + epoch);
    std::vector<double> w = fit.w;
    double b = fit.b;
    for (auto i : order) {
      const auto row = X.row(i);
      const double s = static_cast<double>(signs[i]);
      const bool violated = s * (dot(w, row) + b) < 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        w[j] -= step * (lambda * w[j] - (violated ? s * row[j] : 0.0));
      }
      if (violated) b += step * s;
    }
    const double candidate = svm_objective(w, b, X, signs, lambda);
    if (candidate <= objective) {
      fit.w = std::move(w);
      fit.b = b;
      objective = candidate;
    } else {
      base_step *= 0.5;
    }
    fit.history.push_back(objective);
  }
  return fit;
}

}  // namespace

double svm_objective(std::span<const double> w, double b, const Matrix& X,
                     std::span<const int> signs, double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    hinge += std::max(0.0, 1.0 - signs[i] * (dot(w, X.row(i)) + b));
  }
  return 0.5 * lambda * dot(w, w) + hinge / static_cast<double>(X.rows());
}

SvmModel fit_svm(const Matrix& X, std::span<const int> y, const SvmParams& params) {
  if (X.rows() != y.size()) throw AnalysisError("fit_svm: X and y differ in length");
  if (!(params.C > 0.0) || params.epochs < 0 || !(params.learning_rate > 0.0)) {
    throw AnalysisError("fit_svm: C and learning_rate must be positive, epochs >= 0");
  }
  const std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw AnalysisError("fit_svm: need at least two classes");

  SvmModel model;
  model.params = params;
  model.classes.assign(distinct.begin(), distinct.end());
  std::vector<int> signs(y.size());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    for (std::size_t i = 0; i < y.size(); ++i) signs[i] = y[i] == model.classes[c] ? 1 : -1;
    auto fit = fit_binary(X, signs, params, derive_seed(params.seed, c));
    model.weights.push_back(std::move(fit.w));
    model.biases.push_back(fit.b);
    model.objective_history.push_back(std::move(fit.history));
  }
  return model;
}

std::vector<double> SvmModel::decision_values(std::span<const double> row) const {
  std::vector<double> out;
  out.reserve(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (row.size() != weights[c].size()) throw AnalysisError("svm: row has wrong dimension");
    out.push_back(dot(weights[c], row) + biases[c]);
  }
  return out;
}

int SvmModel::predict(std::span<const double> row) const {
  const auto values = decision_values(row);
  return classes[static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin())];
}

std::vector<int> SvmModel::predict(const Matrix& X) const {
  std::vector<int> out;
  out.reserve(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out.push_back(predict(X.row(i)));
  return out;
}

}  // namespace lungrisk::ml
