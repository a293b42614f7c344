#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "lungrisk/errors.hpp"
#include "lungrisk/features.hpp"
#include "lungrisk/random.hpp"
#include "lungrisk/stats.hpp"
#include "oracles.hpp"

using namespace lungrisk;
using namespace lungrisk::stats;
using V = std::vector<double>;

namespace {
V random_column(Rng& rng, std::size_t n, int hi) {
  V v(n);
  for (auto& x : v) x = static_cast<double>(rng.uniform_int(1, hi));
  return v;
}
}  // namespace

TEST_CASE("pearson basics") {
  CHECK(pearson(V{1, 2, 3}, V{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(V{1, 2, 3}, V{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  Warnings w;
  CHECK(pearson(V{5, 5, 5}, V{1, 2, 3}, &w) == 0.0);
  CHECK(w.size() == 1);
  CHECK_THROWS_AS(pearson(V{1, 2}, V{1, 2, 3}), AnalysisError);
  CHECK_THROWS_AS(pearson(V{1}, V{1}), AnalysisError);
}

TEST_CASE("pearson agrees with the raw-sum oracle and is affine invariant") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(24);
    const V x = random_column(rng, n, 9), y = random_column(rng, n, 9);
    const double r = pearson(x, y);
    CHECK(std::fabs(r - oracle::pearson(x, y)) <= 1e-10);
    CHECK(r == pearson(y, x));
    V ax = x;
    for (auto& v : ax) v = 3.5 * v - 2.0;
    CHECK(std::fabs(pearson(ax, y) - r) <= 1e-12);
  }
}

TEST_CASE("correlation matrix") {
  features::FeatureMatrix fm;
  fm.column_names = {"a", "b", "flat"};
  fm.X = Matrix::from_rows({{1, 2, 4}, {2, 1, 4}, {3, 5, 4}, {4, 3, 4}});
  fm.y = {1, 1, 3, 2};
  const auto cm = pearson_matrix(fm);
  CHECK(cm.labels == std::vector<std::string>{"a", "b", "flat", "Level"});
  CHECK(cm.constant_columns == std::vector<std::string>{"flat"});
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(cm.M(i, j) == cm.M(j, i));
      CHECK(std::fabs(cm.M(i, j)) <= 1.0);
    }
    if (i != 2) CHECK(cm.M(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(cm.M(2, 0) == 0.0);
  CHECK(cm.with_level(0) == doctest::Approx(oracle::pearson({1, 2, 3, 4}, {1, 1, 3, 2})));

  features::FeatureMatrix tiny;
  tiny.column_names = {"a"};
  tiny.X = Matrix::from_rows({{1}, {2}});
  tiny.y = {1, 2};
  CHECK_THROWS_AS(pearson_matrix(tiny), AnalysisError);
}

TEST_CASE("information gain examples") {
  CHECK(information_gain(V{1, 1, 2, 2}, std::vector<int>{1, 1, 3, 3}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(information_gain(V{4, 4, 4, 4}, std::vector<int>{1, 2, 3, 1}) == 0.0);
  const std::vector<int> t{1, 2, 3, 1, 2, 2};
  V same(t.begin(), t.end());
  CHECK(information_gain(same, t) == doctest::Approx(entropy_bits(t)).epsilon(1e-15));
  CHECK(entropy_bits(std::vector<int>{1, 2, 3}) == doctest::Approx(std::log2(3.0)));
  CHECK_THROWS_AS(information_gain(V{1, 2}, std::vector<int>{1}), AnalysisError);
  CHECK_THROWS_AS(information_gain(V{}, std::vector<int>{}), AnalysisError);
}

TEST_CASE("information gain bounds over every 4-row target") {
  const std::vector<int> f{1, 1, 2, 2};
  for (int code = 0; code < 81; ++code) {
    std::vector<int> t(4);
    int c = code;
    for (auto& v : t) {
      v = c % 3 + 1;
      c /= 3;
    }
    const double ig = information_gain(f, t);
    const double ht = entropy_bits(t), hf = entropy_bits(f);
    CHECK(std::fabs(ig - oracle::information_gain(f, t)) <= 1e-12);
    CHECK(ig >= -1e-15);
    CHECK(ig <= std::min(ht, hf) + 1e-12);
    const bool function_of_f = t[0] == t[1] && t[2] == t[3];
    CHECK((std::fabs(ig - ht) <= 1e-12) == function_of_f);
  }
}

TEST_CASE("t and p") {
  SUBCASE("no association") {
    const auto r = t_and_p(V{1, 2, 3, 4}, V{1, 3, 3, 1});
    CHECK(r.t == 0.0);
    CHECK(r.p == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("n = 10, r = 0.6325") {
    const double t = oracle::t_from_r(0.6325, 10);
    CHECK(t == doctest::Approx(2.3094).epsilon(1e-4));
    const double p = student_t_two_sided_p(t, 8);
    CHECK(p == doctest::Approx(0.0496).epsilon(2e-3));
    CHECK(std::fabs(p - oracle::t_two_sided_p(t, 8)) <= 1e-8);
  }
  SUBCASE("perfect correlation") {
    const auto up = t_and_p(V{1, 2, 3}, V{2, 4, 6});
    CHECK(up.t == std::numeric_limits<double>::infinity());
    CHECK(up.p == 0.0);
    const auto down = t_and_p(V{1, 2, 3}, V{6, 4, 2});
    CHECK(down.t == -std::numeric_limits<double>::infinity());
  }
  SUBCASE("p decreases as |t| grows") {
    for (double df : {1.0, 3.0, 8.0, 40.0, 998.0}) {
      double prev = student_t_two_sided_p(0.0, df);
      CHECK(prev == doctest::Approx(1.0));
      for (double t = 0.25; t < 12.0; t += 0.25) {
        const double p = student_t_two_sided_p(t, df);
        CHECK(p < prev);
        CHECK(p == student_t_two_sided_p(-t, df));
        prev = p;
      }
    }
  }
  SUBCASE("tail matches the integrated density") {
    for (double df : {1.0, 2.0, 5.0, 17.0}) {
      for (double t : {0.1, 0.9, 1.7, 3.2}) {
        CHECK(std::fabs(student_t_two_sided_p(t, df) - oracle::t_two_sided_p(t, df)) <= 1e-8);
      }
    }
  }
  SUBCASE("incomplete beta edge values") {
    CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
    CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
  }
  SUBCASE("welch") {
    const auto w = welch_t(V{5, 6, 7, 8}, V{1, 2, 3, 4});
    CHECK(w.t == doctest::Approx(4.0 / std::sqrt(2.0 * (5.0 / 3.0) / 4.0)));
    CHECK(w.df == doctest::Approx(6.0));
    CHECK(w.p < 0.05);
  }
}

TEST_CASE("spearman") {
  CHECK(spearman(V{1, 2, 3}, V{3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman(V{1, 2, 3, 4}, V{1, 4, 9, 16}) == doctest::Approx(1.0));
  CHECK(spearman(V{1, 1, 2}, V{1, 2, 3}) == doctest::Approx(0.866).epsilon(1e-3));
  CHECK(average_ranks(V{10, 10, 3}) == V{2.5, 2.5, 1.0});
  Warnings w;
  CHECK(spearman(V{2, 2, 2}, V{1, 2, 3}, &w) == 0.0);
  CHECK(w.size() == 1);

  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(24);
    const V x = random_column(rng, n, 5), y = random_column(rng, n, 5);
    const double rho = spearman(x, y);
    CHECK(std::fabs(rho - oracle::pearson(oracle::ranks(x), oracle::ranks(y))) <= 1e-10);
    CHECK(rho == spearman(y, x));
    V cubed = x;
    for (auto& v : cubed) v = v * v * v + 7.0;
    CHECK(std::fabs(spearman(cubed, y) - rho) <= 1e-12);
  }
}

TEST_CASE("rank_features") {
  features::FeatureMatrix fm;
  fm.column_names = {"b_noise", "a_signal", "c_signal"};
  fm.X = Matrix::from_rows({{1, 1, 1}, {2, 1, 1}, {1, 2, 2}, {2, 2, 2}, {1, 3, 3}, {2, 3, 3}});
  fm.y = {1, 1, 2, 2, 3, 3};
  const auto scores = rank_features(fm);
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].name == "a_signal");
  CHECK(scores[1].name == "c_signal");
  CHECK(scores[2].name == "b_noise");
  for (const auto& s : scores) {
    CHECK(s.info_gain >= 0.0);
    CHECK(s.p_value >= 0.0);
    CHECK(s.p_value <= 1.0);
    if (std::isfinite(s.t_value) && s.pearson_r != 0.0) CHECK((s.t_value > 0) == (s.pearson_r > 0));
  }

  features::FeatureMatrix one;
  one.column_names = {"x"};
  one.X = Matrix::from_rows({{1}, {3}, {2}, {5}});
  one.y = {1, 3, 1, 3};
  CHECK(rank_features(one).size() == 1);
  const auto hl = rank_features(one, Contrast::HighVsLow);
  CHECK(hl[0].t_value > 0.0);
}
