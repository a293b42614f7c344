#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lungrisk/matrix.hpp"

namespace lungrisk::ml {

struct SvmParams {
  double C = 1.0;
  int epochs = 200;
  double learning_rate = 0.1;  // initial step; decays as lr / sqrt(1 + epoch)
  std::uint64_t seed = 0;
};

// One-vs-rest linear soft-margin SVM.
struct SvmModel {
  std::vector<int> classes;                 // ascending class codes
  std::vector<std::vector<double>> weights;  // one per class
  std::vector<double> biases;
  SvmParams params;
  // Regularized hinge objective per class: entry 0 at w = 0, then one value
  // per epoch boundary.
  std::vector<std::vector<double>> objective_history;

  std::vector<double> decision_values(std::span<const double> row) const;
  // argmax of decision values; ties go to the lowest class code.
  int predict(std::span<const double> row) const;
  std::vector<int> predict(const Matrix& X) const;

  friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

// J(w, b) = lambda/2 |w|^2 + mean_i max(0, 1 - s_i (w.x_i + b)), lambda = 1/(C n),
// with s_i in {-1, +1}.
double svm_objective(std::span<const double> w, double b, const Matrix& X,
                     std::span<const int> signs, double lambda);

// Per class: epoch-ordered stochastic subgradient descent on J with a fresh
// seeded shuffle each epoch. An epoch that raises J is rolled back and the
// base step halved, so J never increases across epoch boundaries.
// Throws AnalysisError with fewer than two classes.
SvmModel fit_svm(const Matrix& X, std::span<const int> y, const SvmParams& params = {});

}  // namespace lungrisk::ml
