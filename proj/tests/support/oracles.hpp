#pragma once

// Brute-force reference implementations used only by tests. They follow
// textbook formulas directly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

// Single-pass raw-sum Pearson in long double.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double vx = n * sxx - sx * sx;
  const long double vy = n * syy - sy * sy;
  if (vx <= 0 || vy <= 0) return 0.0;
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt(vx * vy));
}

// Rank = 1 + #smaller + (#equal - 1) / 2, by counting.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) smaller += 1;
      if (v[j] == v[i]) equal += 1;
    }
    out[i] = 1.0 + smaller + (equal - 1.0) / 2.0;
  }
  return out;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

// Mutual information form: sum p(v,t) log2(p(v,t) / (p(v) p(t))).
template <typename F>
double information_gain(const std::vector<F>& feature, const std::vector<int>& target) {
  const double n = static_cast<double>(feature.size());
  std::map<std::pair<F, int>, double> joint;
  std::map<F, double> pf;
  std::map<int, double> pt;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    joint[{feature[i], target[i]}] += 1.0 / n;
    pf[feature[i]] += 1.0 / n;
    pt[target[i]] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [key, p] : joint) mi += p * std::log(p / (pf[key.first] * pt[key.second]));
  return std::max(0.0, mi / std::numbers::ln2);
}

template <typename F>
double entropy(const std::vector<F>& v) {
  std::map<F, double> counts;
  for (const auto& x : v) counts[x] += 1.0;
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = c / static_cast<double>(v.size());
    h -= p * std::log(p) / std::numbers::ln2;
  }
  return h;
}

inline double t_from_r(double r, std::size_t n) {
  return r * std::sqrt(static_cast<double>(n - 2) / (1.0 - r * r));
}

// Two-sided Student-t tail: 1 - 2 * integral_0^|t| of the density,
// composite Simpson on `intervals` panels.
inline double t_two_sided_p(double t, double df, int intervals = 20000) {
  const double a = std::fabs(t);
  if (a == 0.0) return 1.0;
  const double norm = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
                      std::sqrt(df * std::numbers::pi);
  auto density = [&](double x) { return norm * std::pow(1.0 + x * x / df, -(df + 1) / 2); };
  const double h = a / intervals;
  double s = density(0) + density(a);
  for (int i = 1; i < intervals; ++i) s += density(i * h) * (i % 2 ? 4.0 : 2.0);
  return 1.0 - 2.0 * s * h / 3.0;
}

using Mat = std::vector<std::vector<double>>;

// Determinant by Laplace expansion along the first row.
inline double determinant(const Mat& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1.0;
  if (n == 1) return m[0][0];
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    Mat minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<double> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    det += (c % 2 ? -1.0 : 1.0) * m[0][c] * determinant(minor);
  }
  return det;
}

inline double char_poly(const Mat& a, double lambda) {
  Mat m = a;
  for (std::size_t i = 0; i < m.size(); ++i) m[i][i] -= lambda;
  return determinant(m);
}

struct EigenPair {
  double value;
  std::vector<double> vector;  // unit length
};

// Eigenpairs of a small symmetric matrix: roots of det(A - lambda I) by grid
// scan plus bisection inside the Gershgorin interval; vectors from the
// largest column of adj(A - lambda I). Descending by eigenvalue. Assumes
// simple eigenvalues separated by more than the grid step.
inline std::vector<EigenPair> eigen_by_char_poly(const Mat& a) {
  const std::size_t n = a.size();
  double lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) radius += std::fabs(a[i][j]);
    }
    lo = std::min(lo, a[i][i] - radius);
    hi = std::max(hi, a[i][i] + radius);
  }
  lo -= 1e-6;
  hi += 1e-6;
  const int steps = 200000;
  std::vector<double> roots;
  double prev_x = lo, prev_f = char_poly(a, lo);
  for (int s = 1; s <= steps; ++s) {
    const double x = lo + (hi - lo) * s / steps;
    const double f = char_poly(a, x);
    if (f == 0.0) {
      roots.push_back(x);
    } else if ((prev_f < 0) != (f < 0) && prev_f != 0.0) {
      double l = prev_x, r = x, fl = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (l + r);
        const double fm = char_poly(a, mid);
        if ((fm < 0) == (fl < 0)) {
          l = mid;
          fl = fm;
        } else {
          r = mid;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    prev_x = x;
    prev_f = f;
  }
  std::sort(roots.rbegin(), roots.rend());

  std::vector<EigenPair> out;
  for (double lambda : roots) {
    Mat m = a;
    for (std::size_t i = 0; i < n; ++i) m[i][i] -= lambda;
    std::vector<double> best;
    double best_norm = -1;
    for (std::size_t col = 0; col < n; ++col) {
      // Column `col` of the adjugate: cofactors C(col, r) for each r.
      std::vector<double> v(n);
      for (std::size_t r = 0; r < n; ++r) {
        Mat minor;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == col) continue;
          std::vector<double> row;
          for (std::size_t k = 0; k < n; ++k) {
            if (k != r) row.push_back(m[i][k]);
          }
          minor.push_back(row);
        }
        v[r] = ((col + r) % 2 ? -1.0 : 1.0) * determinant(minor);
      }
      double norm = 0;
      for (double x : v) norm += x * x;
      if (norm > best_norm) {
        best_norm = norm;
        best = v;
      }
    }
    const double len = std::sqrt(best_norm);
    for (auto& x : best) x /= len;
    out.push_back({lambda, best});
  }
  return out;
}

}  // namespace oracle
