#include "lungrisk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "lungrisk/errors.hpp"

namespace lungrisk::stats {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_n,
                const char* what) {
  if (x.size() != y.size()) {
    throw AnalysisError(std::string(what) + ": length mismatch (" + std::to_string(x.size()) +
                        " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < min_n) {
    throw AnalysisError(std::string(what) + ": need at least " + std::to_string(min_n) +
                        " values");
  }
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sum_sq_dev(std::span<const double> x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s;
}

template <typename Key>
double entropy_of_counts(const std::map<Key, std::size_t>& counts, std::size_t n) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

template <typename F>
double information_gain_impl(std::span<const F> feature, std::span<const int> target) {
  if (feature.size() != target.size()) throw AnalysisError("information_gain: length mismatch");
  if (feature.empty()) throw AnalysisError("information_gain: empty input");
  const std::size_t n = target.size();

  std::map<int, std::size_t> target_counts;
  std::map<F, std::map<int, std::size_t>> joint;
  std::map<F, std::size_t> feature_counts;
  for (std::size_t i = 0; i < n; ++i) {
    ++target_counts[target[i]];
    ++joint[feature[i]][target[i]];
    ++feature_counts[feature[i]];
  }
  double conditional = 0.0;
  for (const auto& [value, counts] : joint) {
    const std::size_t nv = feature_counts[value];
    conditional += static_cast<double>(nv) / static_cast<double>(n) * entropy_of_counts(counts, nv);
  }
  return std::max(0.0, entropy_of_counts(target_counts, n) - conditional);
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y, Warnings* warnings) {
  check_pair(x, y, 2, "pearson");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    if (warnings) warnings->push_back("pearson: constant input, correlation set to 0");
    return 0.0;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const features::FeatureMatrix& fm) {
  const std::size_t n = fm.rows();
  const std::size_t d = fm.cols();
  if (n < 3) throw AnalysisError("pearson_matrix: need at least 3 rows");
  if (fm.y.size() != n) throw AnalysisError("pearson_matrix: target length mismatch");

  std::vector<std::vector<double>> cols;
  cols.reserve(d + 1);
  for (std::size_t j = 0; j < d; ++j) cols.push_back(fm.X.column(j));
  cols.emplace_back(fm.y.begin(), fm.y.end());

  CorrelationMatrix cm;
  cm.labels = fm.column_names;
  cm.labels.emplace_back("Level");
  cm.M = Matrix(d + 1, d + 1);
  for (std::size_t j = 0; j <= d; ++j) {
    const double m = mean_of(cols[j]);
    const bool constant = sum_sq_dev(cols[j], m) == 0.0;
    if (constant) cm.constant_columns.push_back(cm.labels[j]);
    cm.M(j, j) = constant ? 0.0 : 1.0;
  }
  for (std::size_t i = 0; i <= d; ++i) {
    for (std::size_t j = i + 1; j <= d; ++j) {
      const double r = pearson(cols[i], cols[j]);
      cm.M(i, j) = r;
      cm.M(j, i) = r;
    }
  }
  return cm;
}

double entropy_bits(std::span<const int> values) {
  if (values.empty()) return 0.0;
  std::map<int, std::size_t> counts;
  for (int v : values) ++counts[v];
  return entropy_of_counts(counts, values.size());
}

double information_gain(std::span<const double> feature, std::span<const int> target) {
  return information_gain_impl(feature, target);
}

double information_gain(std::span<const int> feature, std::span<const int> target) {
  return information_gain_impl(feature, target);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw AnalysisError("incomplete beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other side.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw AnalysisError("student t: degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

TTest t_and_p(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 3, "t_and_p");
  const double r = pearson(x, y);
  const double df = static_cast<double>(x.size() - 2);
  TTest out;
  out.df = df;
  if (std::fabs(r) >= 1.0) {
    out.t = std::copysign(std::numeric_limits<double>::infinity(), r);
    out.p = 0.0;
    return out;
  }
  out.t = r * std::sqrt(df / (1.0 - r * r));
  out.p = student_t_two_sided_p(out.t, df);
  return out;
}

TTest welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw AnalysisError("welch_t: each group needs 2 values");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sum_sq_dev(a, ma) / static_cast<double>(a.size() - 1);
  const double vb = sum_sq_dev(b, mb) / static_cast<double>(b.size() - 1);
  const double sa = va / static_cast<double>(a.size());
  const double sb = vb / static_cast<double>(b.size());
  TTest out;
  if (sa + sb == 0.0) {
    out.df = static_cast<double>(a.size() + b.size() - 2);
    if (ma == mb) return out;
    out.t = std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
    out.p = 0.0;
    return out;
  }
  out.t = (ma - mb) / std::sqrt(sa + sb);
  out.df = (sa + sb) * (sa + sb) /
           (sa * sa / static_cast<double>(a.size() - 1) + sb * sb / static_cast<double>(b.size() - 1));
  out.p = student_t_two_sided_p(out.t, out.df);
  return out;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    // Positions i..j (0-based) hold ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y, Warnings* warnings) {
  check_pair(x, y, 2, "spearman");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  Warnings local;
  const double rho = pearson(rx, ry, &local);
  if (!local.empty() && warnings) {
    warnings->push_back("spearman: constant input, correlation set to 0");
  }
  return rho;
}

std::vector<FeatureScore> rank_features(const features::FeatureMatrix& fm, Contrast contrast) {
  const std::size_t n = fm.rows();
  if (fm.y.size() != n) throw AnalysisError("rank_features: target length mismatch");
  const std::vector<double> target(fm.y.begin(), fm.y.end());

  std::vector<FeatureScore> scores;
  scores.reserve(fm.cols());
  for (std::size_t j = 0; j < fm.cols(); ++j) {
    const auto column = fm.X.column(j);
    FeatureScore s;
    s.name = fm.column_names[j];
    s.pearson_r = pearson(column, target);
    s.info_gain = information_gain(std::span<const double>(column), fm.y);
    TTest tt;
    if (contrast == Contrast::Regression) {
      tt = t_and_p(column, target);
    } else {
      std::vector<double> high, low;
      for (std::size_t i = 0; i < n; ++i) {
        if (fm.y[i] == level_code(Level::High)) high.push_back(column[i]);
        if (fm.y[i] == level_code(Level::Low)) low.push_back(column[i]);
      }
      tt = welch_t(high, low);
    }
    s.t_value = tt.t;
    s.p_value = tt.p;
    scores.push_back(std::move(s));
  }
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    if (a.info_gain != b.info_gain) return a.info_gain > b.info_gain;
    return a.name < b.name;
  });
  return scores;
}

}  // namespace lungrisk::stats
