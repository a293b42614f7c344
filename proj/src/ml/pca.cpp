#include "lungrisk/ml/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lungrisk/errors.hpp"
#include "lungrisk/features.hpp"

namespace lungrisk::ml {
namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& symmetric) {
  const std::size_t n = symmetric.rows();
  if (symmetric.cols() != n) throw AnalysisError("jacobi_eigen: matrix is not square");
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      norm += symmetric(i, j) * symmetric(i, j);
      const double diff = std::fabs(symmetric(i, j) - symmetric(j, i));
      if (diff > 1e-12 * std::max(1.0, std::fabs(symmetric(i, j)))) {
        throw AnalysisError("jacobi_eigen: matrix is not symmetric");
      }
    }
  }
  const double tolerance = 1e-12 * std::max(1.0, std::sqrt(norm));

  Matrix a = symmetric;
  Matrix v = Matrix::identity(n);
  EigenDecomposition out;
  constexpr int kMaxSweeps = 100;
  while (off_diagonal_norm(a) > tolerance && out.sweeps < kMaxSweeps) {
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing a(p, q); t is the smaller root of
        // t^2 + 2 theta t - 1 = 0.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_diagonal_norm(a) > tolerance) {
    throw AnalysisError("jacobi_eigen: no convergence after " + std::to_string(kMaxSweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) > a(y, y); });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

Matrix covariance(const Matrix& X) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (n < 2) throw AnalysisError("covariance: need at least 2 rows");
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += X(i, j);
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  Matrix c(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < d; ++p) {
      const double dp = X(i, p) - mean[p];
      for (std::size_t q = p; q < d; ++q) c(p, q) += dp * (X(i, q) - mean[q]);
    }
  }
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p; q < d; ++q) {
      c(p, q) /= static_cast<double>(n - 1);
      c(q, p) = c(p, q);
    }
  }
  return c;
}

PcaModel fit_pca(const Matrix& X, std::size_t k) {
  if (k > X.cols()) {
    throw AnalysisError("fit_pca: k = " + std::to_string(k) + " exceeds " +
                        std::to_string(X.cols()) + " features");
  }
  if (X.rows() < 2) throw AnalysisError("fit_pca: need at least 2 rows");
  auto standardization = features::standardize(X);
  const auto eig = jacobi_eigen(covariance(standardization.Z));

  PcaModel model;
  model.means = std::move(standardization.means);
  model.stds = std::move(standardization.stds);
  model.eigenvalues = eig.values;
  const std::size_t d = X.cols();
  model.components = Matrix(k, d);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t largest = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::fabs(eig.vectors(j, c)) > std::fabs(eig.vectors(largest, c))) largest = j;
    }
    const double sign = eig.vectors(largest, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) model.components(c, j) = sign * eig.vectors(j, c);
    model.explained_variance.push_back(std::max(0.0, eig.values[c]));
  }
  return model;
}

Matrix PcaModel::transform(const Matrix& X) const {
  if (X.cols() != means.size()) throw AnalysisError("pca transform: column count mismatch");
  const Matrix Z = features::apply_standardization(X, means, stds);
  Matrix out(X.rows(), components.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t c = 0; c < components.rows(); ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < X.cols(); ++j) s += Z(i, j) * components(c, j);
      out(i, c) = s;
    }
  }
  return out;
}

}  // namespace lungrisk::ml
