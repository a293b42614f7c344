#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "lungrisk/errors.hpp"
#include "lungrisk/features.hpp"
#include "lungrisk/ml/kmeans.hpp"
#include "lungrisk/ml/pca.hpp"
#include "lungrisk/ml/svm.hpp"
#include "lungrisk/random.hpp"
#include "oracles.hpp"

using namespace lungrisk;
using namespace lungrisk::ml;

namespace {
double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Three tight blobs far apart; labels are blob codes 1..3.
Matrix blobs(Rng& rng, std::size_t per_blob, std::vector<int>& labels) {
  const double centers[3][2] = {{0, 0}, {50, 0}, {0, 50}};
  Matrix X(3 * per_blob, 2);
  labels.clear();
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      const std::size_t r = b * per_blob + i;
      X(r, 0) = centers[b][0] + rng.normal();
      X(r, 1) = centers[b][1] + rng.normal();
      labels.push_back(static_cast<int>(b) + 1);
    }
  }
  return X;
}
}  // namespace

TEST_CASE("jacobi against the characteristic polynomial") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng.uniform_index(3);
    Matrix A(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) A(i, j) = A(j, i) = rng.uniform01() * 4.0 - 2.0;
    oracle::Mat m(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m[i][j] = A(i, j);
    const auto e = jacobi_eigen(A);
    const auto expected = oracle::eigen_by_char_poly(m);
    for (std::size_t k = 0; k < d; ++k) {
      CHECK(std::fabs(e.values[k] - expected[k].value) <= 1e-8);
      double dot = 0;
      for (std::size_t i = 0; i < d; ++i) dot += e.vectors(i, k) * expected[k].vector[i];
      CHECK(std::fabs(std::fabs(dot) - 1.0) <= 1e-8);
    }
  }
  CHECK_THROWS_AS(jacobi_eigen(Matrix::from_rows({{1, 2}, {0, 1}})), AnalysisError);
  CHECK_THROWS_AS(jacobi_eigen(Matrix(2, 3)), AnalysisError);
}

TEST_CASE("pca on a line") {
  const Matrix X = Matrix::from_rows({{1, 1}, {2, 2}, {3, 3}, {4, 4}});
  const auto pca = fit_pca(X, 2);
  CHECK(pca.components(0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(pca.components(0, 1) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(pca.explained_variance[0] == doctest::Approx(2.0));
  CHECK(std::fabs(pca.explained_variance[1]) <= 1e-12);
  CHECK_THROWS_AS(fit_pca(X, 3), AnalysisError);
}

TEST_CASE("pca invariants") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 30, d = 2 + rng.uniform_index(6);
    Matrix X(n, d);
    for (auto& v : X.data()) v = rng.normal() * 3.0 + static_cast<double>(rng.uniform_int(0, 3));
    const auto pca = fit_pca(X, 2);
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        double dot = 0;
        for (std::size_t j = 0; j < d; ++j) dot += pca.components(a, j) * pca.components(b, j);
        CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) <= 1e-9);
      }
      std::size_t biggest = 0;
      for (std::size_t j = 1; j < d; ++j)
        if (std::fabs(pca.components(a, j)) > std::fabs(pca.components(a, biggest))) biggest = j;
      CHECK(pca.components(a, biggest) > 0);
      CHECK(pca.explained_variance[a] == pca.eigenvalues[a]);
    }
    CHECK(pca.explained_variance[0] >= pca.explained_variance[1]);
    CHECK(pca.explained_variance[1] >= 0);
    CHECK(std::fabs(std::accumulate(pca.eigenvalues.begin(), pca.eigenvalues.end(), 0.0) - double(d)) <= 1e-6);
  }
  // A full-rank 2-D rotation keeps pairwise distances of the standardized data.
  Matrix X(15, 2);
  for (auto& v : X.data()) v = rng.normal();
  const auto pca = fit_pca(X, 2);
  const Matrix S = features::apply_standardization(X, pca.means, pca.stds);
  const Matrix P = pca.transform(X);
  for (std::size_t a = 0; a < 15; ++a)
    for (std::size_t b = a + 1; b < 15; ++b) CHECK(std::fabs(dist(S.row(a), S.row(b)) - dist(P.row(a), P.row(b))) <= 1e-9);
}

TEST_CASE("svm on separable data") {
  Rng rng(2);
  Matrix X(80, 2);
  std::vector<int> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    const bool far = i % 2 == 1;
    X(i, 0) = (far ? 10.0 : 0.0) + rng.normal() * 0.5;
    X(i, 1) = (far ? 10.0 : 0.0) + rng.normal() * 0.5;
    y[i] = far ? 3 : 1;
  }
  const auto model = fit_svm(X, y, {.seed = 5});
  CHECK(model.classes == std::vector<int>{1, 3});
  CHECK(model.predict(X) == y);
  const auto again = fit_svm(X, y, {.seed = 5});
  CHECK(again.weights == model.weights);
  CHECK(again.biases == model.biases);
  for (const auto& hist : model.objective_history) {
    REQUIRE(hist.size() == 201);
    for (std::size_t e = 1; e < hist.size(); ++e) CHECK(hist[e] <= hist[e - 1]);
  }
  const std::vector<int> one(80, 2);
  CHECK_THROWS_AS(fit_svm(X, one), AnalysisError);
}

TEST_CASE("svm three blobs and monotone objective") {
  Rng rng(14);
  std::vector<int> labels;
  const Matrix X = blobs(rng, 40, labels);
  for (double lr : {0.01, 0.1, 1.0, 10.0}) {
    const auto model = fit_svm(X, labels, {.C = 1.0, .epochs = 60, .learning_rate = lr, .seed = 3});
    for (const auto& hist : model.objective_history)
      for (std::size_t e = 1; e < hist.size(); ++e) CHECK(hist[e] <= hist[e - 1]);
  }
  const auto model = fit_svm(X, labels, {.seed = 3});
  const auto pred = model.predict(X);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i];
  CHECK(hits == pred.size());
}

TEST_CASE("svm objective") {
  const Matrix X = Matrix::from_rows({{1, 0}, {-1, 0}});
  const std::vector<int> s{1, -1};
  const std::vector<double> zero{0, 0};
  CHECK(svm_objective(zero, 0.0, X, s, 0.5) == 1.0);
  const std::vector<double> w{2, 0};
  CHECK(svm_objective(w, 0.0, X, s, 0.5) == 1.0);  // 0.25 * 4 + 0
}

TEST_CASE("kmeans with one cluster") {
  const Matrix X = Matrix::from_rows({{0, 0}, {2, 0}, {4, 6}});
  const auto m = fit_kmeans(X, {.k = 1, .seed = 1});
  CHECK(m.centroids(0, 0) == doctest::Approx(2.0));
  CHECK(m.centroids(0, 1) == doctest::Approx(2.0));
  // Sum of squared deviations from the mean.
  CHECK(m.inertia == doctest::Approx(4 + 4 + 0 + 4 + 4 + 16));
  CHECK_THROWS_AS(fit_kmeans(X, {.k = 4}), AnalysisError);
  CHECK_THROWS_AS(fit_kmeans(X, {.k = 0}), AnalysisError);
}

TEST_CASE("kmeans recovers separated blobs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    std::vector<int> labels;
    const Matrix X = blobs(rng, 30, labels);
    const auto m = fit_kmeans(X, {.k = 3, .seed = seed});
    CHECK(m.converged);
    std::set<std::pair<int, std::size_t>> pairs;
    for (std::size_t i = 0; i < labels.size(); ++i) pairs.insert({labels[i], m.assignments[i]});
    CHECK(pairs.size() == 3);
    for (std::size_t e = 1; e < m.inertia_history.size(); ++e) CHECK(m.inertia_history[e] <= m.inertia_history[e - 1] + 1e-9);

    const auto majority = map_clusters(m, labels, ClusterMapping::Majority);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += majority[m.assignments[i]] == labels[i];
    CHECK(hits == labels.size());

    const auto raw = map_clusters(m, labels, ClusterMapping::Raw);
    CHECK(raw == std::vector<int>{1, 2, 3});

    // Converged centroids are a fixed point.
    const auto rerun = run_lloyd(X, m.centroids);
    CHECK(rerun.assignments == m.assignments);
    CHECK(rerun.centroids == m.centroids);
    for (std::size_t c = 0; c < 3; ++c) {
      double sx = 0, sy = 0, cnt = 0;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (m.assignments[i] == c) sx += X(i, 0), sy += X(i, 1), cnt += 1;
      CHECK(m.centroids(c, 0) == doctest::Approx(sx / cnt));
      CHECK(m.centroids(c, 1) == doctest::Approx(sy / cnt));
    }
  }
}

TEST_CASE("majority mapping never loses to raw") {
  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix X(30, 2);
    for (auto& v : X.data()) v = rng.normal();
    std::vector<int> y(30);
    for (auto& v : y) v = static_cast<int>(rng.uniform_int(1, 3));
    const auto m = fit_kmeans(X, {.k = 3, .seed = static_cast<std::uint64_t>(trial)});
    auto accuracy = [&](const std::vector<int>& map) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < y.size(); ++i) hits += map[m.assignments[i]] == y[i];
      return hits;
    };
    CHECK(accuracy(map_clusters(m, y, ClusterMapping::Majority)) >= accuracy(map_clusters(m, y, ClusterMapping::Raw)));
  }
  const auto two = fit_kmeans(Matrix::from_rows({{0}, {1}, {9}}), {.k = 2});
  const std::vector<int> y{1, 1, 2};
  CHECK_THROWS_AS(map_clusters(two, y, ClusterMapping::Raw), AnalysisError);
}
