#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lungrisk::eval {

// Rows are actual classes, columns predicted, in label order.
struct ConfusionMatrix {
  std::vector<std::string> class_labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t actual) const;
  std::size_t col_sum(std::size_t predicted) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Class codes 1..labels.size(); by default Low, Medium, High. Throws
// AnalysisError on empty or mismatched input and on codes outside the range.
ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted);
ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted,
                          std::vector<std::string> class_labels);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::string evaluated_on;  // "test split" or "full dataset"
  std::vector<std::string> warnings;
};

// Zero denominators give 0 and a warning.
MetricsReport metrics(const ConfusionMatrix& cm, std::string evaluated_on = "test split");

std::string to_csv(const ConfusionMatrix& cm);

}  // namespace lungrisk::eval
