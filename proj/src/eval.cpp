#include "lungrisk/eval.hpp"

#include <sstream>

#include "lungrisk/csv.hpp"
#include "lungrisk/errors.hpp"
#include "lungrisk/level.hpp"

namespace lungrisk::eval {

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (const auto& row : counts) {
    for (auto c : row) s += c;
  }
  return s;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i][i];
  return s;
}

std::size_t ConfusionMatrix::row_sum(std::size_t actual) const {
  std::size_t s = 0;
  for (auto c : counts[actual]) s += c;
  return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::size_t s = 0;
  for (const auto& row : counts) s += row[predicted];
  return s;
}

ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted) {
  std::vector<std::string> labels;
  for (Level l : kAllLevels) labels.emplace_back(level_name(l));
  return confusion(actual, predicted, std::move(labels));
}

ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted,
                          std::vector<std::string> class_labels) {
  if (actual.size() != predicted.size()) throw AnalysisError("confusion: length mismatch");
  if (actual.empty()) throw AnalysisError("confusion: no samples");
  const int c = static_cast<int>(class_labels.size());
  ConfusionMatrix cm;
  cm.class_labels = std::move(class_labels);
  cm.counts.assign(static_cast<std::size_t>(c), std::vector<std::size_t>(static_cast<std::size_t>(c), 0));
  for (std::size_t i = 0; i < actual.size(); ++i) {
    for (int code : {actual[i], predicted[i]}) {
      if (code < 1 || code > c) {
        throw AnalysisError("confusion: unknown label code " + std::to_string(code) + " at index " +
                            std::to_string(i));
      }
    }
    ++cm.counts[static_cast<std::size_t>(actual[i] - 1)][static_cast<std::size_t>(predicted[i] - 1)];
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm, std::string evaluated_on) {
  MetricsReport report;
  report.evaluated_on = std::move(evaluated_on);
  const std::size_t c = cm.counts.size();
  const std::size_t total = cm.total();
  for (std::size_t k = 0; k < c; ++k) {
    ClassMetrics m;
    m.label = cm.class_labels[k];
    const auto tp = static_cast<double>(cm.counts[k][k]);
    const auto predicted = static_cast<double>(cm.col_sum(k));
    const auto actual = static_cast<double>(cm.row_sum(k));
    m.support = cm.row_sum(k);
    if (predicted > 0) {
      m.precision = tp / predicted;
    } else {
      report.warnings.push_back("precision of " + m.label + " undefined (no predictions), set to 0");
    }
    if (actual > 0) {
      m.recall = tp / actual;
    } else {
      report.warnings.push_back("recall of " + m.label + " undefined (no samples), set to 0");
    }
    if (m.precision + m.recall > 0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    report.macro_precision += m.precision;
    report.macro_recall += m.recall;
    report.macro_f1 += m.f1;
    report.per_class.push_back(std::move(m));
  }
  if (c > 0) {
    report.macro_precision /= static_cast<double>(c);
    report.macro_recall /= static_cast<double>(c);
    report.macro_f1 /= static_cast<double>(c);
  }
  report.accuracy = total ? static_cast<double>(cm.trace()) / static_cast<double>(total) : 0.0;
  return report;
}

std::string to_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  csv::Row header{"actual\\predicted"};
  header.insert(header.end(), cm.class_labels.begin(), cm.class_labels.end());
  out << csv::format_row(header) << '\n';
  for (std::size_t i = 0; i < cm.counts.size(); ++i) {
    csv::Row row{cm.class_labels[i]};
    for (auto v : cm.counts[i]) row.push_back(std::to_string(v));
    out << csv::format_row(row) << '\n';
  }
  return out.str();
}

}  // namespace lungrisk::eval
