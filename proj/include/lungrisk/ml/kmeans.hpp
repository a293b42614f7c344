#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lungrisk/matrix.hpp"

namespace lungrisk::ml {

struct KMeansParams {
  std::size_t k = 3;
  std::uint64_t seed = 0;
  int max_iter = 300;
  double tol = 1e-6;
};

struct KMeansModel {
  std::size_t k = 0;
  Matrix centroids;                      // k x d
  std::vector<std::size_t> assignments;  // per training row
  double inertia = 0.0;
  // Inertia after each Lloyd iteration (update then reassign).
  std::vector<double> inertia_history;
  int iterations = 0;
  bool converged = false;

  // Nearest centroid; ties go to the lowest index.
  std::size_t nearest(std::span<const double> row) const;
};

// k-means++ seeding, then Lloyd iterations until no assignment changes, the
// largest centroid shift is below tol, or max_iter is reached. An emptied
// cluster is re-seeded at the point farthest from its own centroid.
// Throws AnalysisError when n < k or k == 0.
KMeansModel fit_kmeans(const Matrix& X, const KMeansParams& params = {});

// Lloyd iterations from given starting centroids.
KMeansModel run_lloyd(const Matrix& X, Matrix centroids, int max_iter = 300, double tol = 1e-6);

double inertia(const Matrix& X, const Matrix& centroids, std::span<const std::size_t> assignments);

enum class ClusterMapping {
  Raw,       // cluster i -> class code i + 1
  Majority,  // cluster -> its most frequent true class
};

std::string_view cluster_mapping_name(ClusterMapping m);

// Cluster -> class code. Majority ties, and empty clusters, take the lowest
// class code. Raw requires k == n_classes. Labels are codes 1..n_classes.
std::vector<int> map_clusters(const KMeansModel& model, std::span<const int> labels,
                              ClusterMapping mode, int n_classes = 3);

}  // namespace lungrisk::ml
