#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lungrisk/features.hpp"
#include "lungrisk/matrix.hpp"

namespace lungrisk::stats {

using Warnings = std::vector<std::string>;

// Sample Pearson correlation, clamped to [-1, 1]. A constant input yields 0
// and a warning. Throws AnalysisError on length mismatch or n < 2.
double pearson(std::span<const double> x, std::span<const double> y, Warnings* warnings = nullptr);

struct CorrelationMatrix {
  std::vector<std::string> labels;  // features, then "Level"
  Matrix M;
  std::vector<std::string> constant_columns;

  // Column of the encoded level: each feature's influence ratio.
  double with_level(std::size_t feature) const { return M(feature, M.cols() - 1); }
};

// Pearson correlation of every pair of columns, with the encoded level
// appended as the last column. Requires n >= 3.
CorrelationMatrix pearson_matrix(const features::FeatureMatrix& fm);

// Shannon entropy in bits of a discrete column; 0 log 0 = 0.
double entropy_bits(std::span<const int> values);

// H(target) - H(target | feature) in bits, treating each distinct feature
// value as a category. Throws AnalysisError on length mismatch or empty input.
double information_gain(std::span<const double> feature, std::span<const int> target);
double information_gain(std::span<const int> feature, std::span<const int> target);

struct TTest {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
};

// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Univariate regression t-statistic of y on x: t = r sqrt((n-2)/(1-r^2)),
// two-sided p with n-2 degrees of freedom. |r| = 1 gives t = +-inf, p = 0.
TTest t_and_p(std::span<const double> x, std::span<const double> y);

// Welch two-sample t-test of mean(a) - mean(b).
TTest welch_t(std::span<const double> a, std::span<const double> b);

// Ranks starting at 1; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

// Pearson correlation of average ranks. A constant input yields 0 and a warning.
double spearman(std::span<const double> x, std::span<const double> y, Warnings* warnings = nullptr);

struct FeatureScore {
  std::string name;
  double pearson_r = 0.0;
  double info_gain = 0.0;
  double t_value = 0.0;
  double p_value = 1.0;
};

enum class Contrast {
  Regression,  // t of the encoded level regressed on the feature
  HighVsLow,   // Welch test, High-level rows against Low-level rows
};

// One score per feature column, sorted by information gain descending, ties
// by name ascending.
std::vector<FeatureScore> rank_features(const features::FeatureMatrix& fm,
                                        Contrast contrast = Contrast::Regression);

}  // namespace lungrisk::stats
