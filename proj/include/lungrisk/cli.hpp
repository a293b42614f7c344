#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace lungrisk::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInput = 2,
  kPrecondition = 3,
};

struct PipelineConfig {
  std::string patients;
  std::string incidence;
  std::string forest;
  std::string loss;
  std::string iso = "VNM";
  std::string out = "out";

  std::uint64_t seed = 42;
  double split_ratio = 0.7;
  bool stratified = false;
  bool pca_on_all = false;
  bool interpolate_years = false;
  std::string contrast = "regression";  // or "high-vs-low"
  std::string impute = "median";        // median | mode | drop_row

  int tree_max_depth = 0;  // 0: unlimited
  std::size_t tree_min_samples_split = 2;
  std::size_t forest_trees = 100;
  std::size_t forest_max_features = 0;  // 0: floor(sqrt(d))
  bool forest_bootstrap = true;
  unsigned threads = 1;
  double svm_c = 1.0;
  int svm_epochs = 200;
  double svm_learning_rate = 0.1;
  std::size_t kmeans_k = 3;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;
  std::string kmeans_space = "standardized";  // or "pca"
  bool charts = true;
};

nlohmann::ordered_json to_json(const PipelineConfig& config);
// Keys absent from `j` keep their current value; unknown keys are rejected.
void merge_json(PipelineConfig& config, const nlohmann::ordered_json& j);

// Runs one command line (args exclude the program name). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lungrisk::cli
