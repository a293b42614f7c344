#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "lungrisk/eval.hpp"
#include "lungrisk/features.hpp"
#include "lungrisk/ingest.hpp"
#include "lungrisk/ml/forest.hpp"
#include "lungrisk/ml/kmeans.hpp"
#include "lungrisk/ml/pca.hpp"
#include "lungrisk/ml/split.hpp"
#include "lungrisk/ml/svm.hpp"
#include "lungrisk/ml/tree.hpp"
#include "lungrisk/stats.hpp"

namespace lungrisk::report {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kModelFormat = "lungrisk-model";
inline constexpr std::string_view kReportFormat = "lungrisk-report";
inline constexpr int kSchemaVersion = 1;

// Finite values stay numbers; +-inf and NaN become the strings "inf", "-inf", "nan".
Json number(double x);
double number_from(const Json& j);

Json to_json(const ingest::LoadReport& report);
Json to_json(const stats::CorrelationMatrix& cm);
Json to_json(const std::vector<stats::FeatureScore>& scores);
Json to_json(const ml::SplitResult& split);
Json to_json(const eval::ConfusionMatrix& cm);
Json to_json(const eval::MetricsReport& m);

// Model documents carry {"format", "version", "kind"} headers.
Json to_json(const ml::TreeModel& model);
Json to_json(const ml::ForestModel& model);
Json to_json(const ml::PcaModel& model);
Json to_json(const ml::SvmModel& model);
Json to_json(const ml::KMeansModel& model);

// Throw SchemaError on a wrong kind, format or version.
ml::TreeModel tree_from_json(const Json& j);
ml::ForestModel forest_from_json(const Json& j);
ml::PcaModel pca_from_json(const Json& j);
ml::SvmModel svm_from_json(const Json& j);
ml::KMeansModel kmeans_from_json(const Json& j);

Json model_header(std::string_view kind);

// 2-space indented JSON with a trailing newline.
std::string dump(const Json& j);

// Writes to a temporary sibling, then renames over the destination.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace lungrisk::report
