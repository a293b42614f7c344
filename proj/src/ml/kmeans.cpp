#include "lungrisk/ml/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lungrisk/errors.hpp"
#include "lungrisk/random.hpp"

namespace lungrisk::ml {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> row) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(centroids.row(c), row);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Returns true if any assignment changed.
bool assign(const Matrix& X, const Matrix& centroids, std::vector<std::size_t>& assignments) {
  bool changed = false;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const std::size_t c = nearest_centroid(centroids, X.row(i));
    if (c != assignments[i]) {
      assignments[i] = c;
      changed = true;
    }
  }
  return changed;
}

Matrix plus_plus_seeds(const Matrix& X, std::size_t k, Rng& rng) {
  const std::size_t n = X.rows();
  Matrix centroids(k, X.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = static_cast<std::size_t>(rng.uniform_index(n));
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double v : d2) total += v;
      if (total <= 0.0) {
        pick = static_cast<std::size_t>(rng.uniform_index(n));
      } else {
        const double target = rng.uniform01() * total;
        double cumulative = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          cumulative += d2[i];
          if (cumulative > target) {
            pick = i;
            break;
          }
        }
      }
    }
    std::copy(X.row(pick).begin(), X.row(pick).end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(X.row(i), centroids.row(c)));
    }
  }
  return centroids;
}

}  // namespace

double inertia(const Matrix& X, const Matrix& centroids, std::span<const std::size_t> assignments) {
  double s = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) s += squared_distance(X.row(i), centroids.row(assignments[i]));
  return s;
}

std::size_t KMeansModel::nearest(std::span<const double> row) const {
  if (row.size() != centroids.cols()) throw AnalysisError("kmeans: row has wrong dimension");
  return nearest_centroid(centroids, row);
}

KMeansModel run_lloyd(const Matrix& X, Matrix centroids, int max_iter, double tol) {
  const std::size_t n = X.rows();
  const std::size_t k = centroids.rows();
  const std::size_t d = X.cols();
  if (k == 0 || n < k) throw AnalysisError("kmeans: need k >= 1 and n >= k");
  if (centroids.cols() != d) throw AnalysisError("kmeans: centroid dimension mismatch");

  KMeansModel model;
  model.k = k;
  model.assignments.assign(n, k);  // k marks "unassigned" so the first pass counts as a change
  assign(X, centroids, model.assignments);

  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix updated(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = model.assignments[i];
      ++counts[c];
      auto dst = updated.row(c);
      auto src = X.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
    std::vector<bool> used(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (auto& v : updated.row(c)) v /= static_cast<double>(counts[c]);
        continue;
      }
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const double dist = squared_distance(X.row(i), centroids.row(model.assignments[i]));
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      used[far] = true;
      std::copy(X.row(far).begin(), X.row(far).end(), updated.row(c).begin());
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(updated.row(c), centroids.row(c))));
    }
    centroids = std::move(updated);
    const bool changed = assign(X, centroids, model.assignments);
    model.inertia_history.push_back(inertia(X, centroids, model.assignments));
    model.iterations = iter + 1;
    if (!changed || shift < tol) {
      model.converged = true;
      break;
    }
  }
  model.centroids = std::move(centroids);
  model.inertia = inertia(X, model.centroids, model.assignments);
  return model;
}

KMeansModel fit_kmeans(const Matrix& X, const KMeansParams& params) {
  if (params.k == 0) throw AnalysisError("kmeans: k must be >= 1");
  if (X.rows() < params.k) {
    throw AnalysisError("kmeans: " + std::to_string(X.rows()) + " rows is fewer than k = " +
                        std::to_string(params.k));
  }
  Rng rng(params.seed);
  return run_lloyd(X, plus_plus_seeds(X, params.k, rng), params.max_iter, params.tol);
}

std::string_view cluster_mapping_name(ClusterMapping m) {
  return m == ClusterMapping::Raw ? "raw" : "majority";
}

std::vector<int> map_clusters(const KMeansModel& model, std::span<const int> labels,
                              ClusterMapping mode, int n_classes) {
  if (labels.size() != model.assignments.size()) {
    throw AnalysisError("map_clusters: labels and assignments differ in length");
  }
  std::vector<int> mapping(model.k, 1);
  if (mode == ClusterMapping::Raw) {
    if (model.k != static_cast<std::size_t>(n_classes)) {
      throw AnalysisError("map_clusters: raw mapping needs k == number of classes");
    }
    for (std::size_t c = 0; c < model.k; ++c) mapping[c] = static_cast<int>(c) + 1;
    return mapping;
  }
  std::vector<std::vector<std::size_t>> counts(model.k, std::vector<std::size_t>(static_cast<std::size_t>(n_classes), 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > n_classes) throw AnalysisError("map_clusters: label out of range");
    ++counts[model.assignments[i]][static_cast<std::size_t>(labels[i] - 1)];
  }
  for (std::size_t c = 0; c < model.k; ++c) {
    mapping[c] = static_cast<int>(std::max_element(counts[c].begin(), counts[c].end()) - counts[c].begin()) + 1;
  }
  return mapping;
}

}  // namespace lungrisk::ml
