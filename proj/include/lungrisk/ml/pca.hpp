#pragma once

#include <cstddef>
#include <vector>

#include "lungrisk/matrix.hpp"

namespace lungrisk::ml {

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
  int sweeps = 0;
};

// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal
// Frobenius norm drops to 1e-12 (scaled by the matrix norm when that
// exceeds 1). Throws AnalysisError on a non-square or non-symmetric input.
EigenDecomposition jacobi_eigen(const Matrix& symmetric);

// Sample covariance (n - 1 divisor) of the columns of X.
Matrix covariance(const Matrix& X);

struct PcaModel {
  std::vector<double> means;
  std::vector<double> stds;
  Matrix components;                // k x d, orthonormal rows
  std::vector<double> explained_variance;  // k, descending
  std::vector<double> eigenvalues;  // all d, descending

  Matrix transform(const Matrix& X) const;

  friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

// Standardizes X (statistics stored in the model), then projects onto the
// top-k eigenvectors of the covariance. The largest-magnitude loading of each
// component is positive. Throws AnalysisError if k > d or n < 2.
PcaModel fit_pca(const Matrix& X, std::size_t k = 2);

}  // namespace lungrisk::ml
