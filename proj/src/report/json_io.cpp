#include "lungrisk/report/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "lungrisk/errors.hpp"

namespace lungrisk::report {
namespace {

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (double v : m.row(i)) row.push_back(number(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const Json& j) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    std::vector<double> r;
    for (const auto& v : row) r.push_back(number_from(v));
    rows.push_back(std::move(r));
  }
  return Matrix::from_rows(rows);
}

Json vector_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

std::vector<double> vector_from(const Json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number_from(v));
  return out;
}

void check_header(const Json& j, std::string_view kind) {
  if (!j.is_object() || j.value("format", "") != kModelFormat) {
    throw SchemaError("not a lungrisk model document");
  }
  if (j.value("version", 0) != kSchemaVersion) {
    throw SchemaError("unsupported model version " + j.value("version", Json(0)).dump());
  }
  if (j.value("kind", "") != kind) {
    throw SchemaError("expected model kind '" + std::string(kind) + "', found '" +
                      j.value("kind", "") + "'");
  }
}

Json node_json(const ml::TreeModel& model, std::size_t id) {
  const auto& n = model.nodes[id];
  Json j;
  j["samples"] = n.samples;
  j["gini"] = number(n.gini);
  j["class_histogram"] = n.class_histogram;
  j["prediction"] = n.prediction;
  j["prediction_label"] = level_from_code(n.prediction) ? std::string(level_name(*level_from_code(n.prediction)))
                                                         : std::to_string(n.prediction);
  if (!n.is_leaf()) {
    j["feature"] = n.feature;
    const auto f = static_cast<std::size_t>(n.feature);
    if (f < model.feature_names.size()) j["feature_name"] = model.feature_names[f];
    j["threshold"] = number(n.threshold);
    j["left"] = node_json(model, static_cast<std::size_t>(n.left));
    j["right"] = node_json(model, static_cast<std::size_t>(n.right));
  }
  return j;
}

int node_from(const Json& j, int depth, std::vector<ml::TreeNode>& nodes) {
  const int id = static_cast<int>(nodes.size());
  nodes.push_back({});
  {
    auto& n = nodes.back();
    n.samples = j.at("samples").get<std::size_t>();
    n.gini = number_from(j.at("gini"));
    n.class_histogram = j.at("class_histogram").get<std::vector<std::size_t>>();
    n.prediction = j.at("prediction").get<int>();
    n.depth = depth;
  }
  if (j.contains("feature")) {
    const int feature = j.at("feature").get<int>();
    const double threshold = number_from(j.at("threshold"));
    const int l = node_from(j.at("left"), depth + 1, nodes);
    const int r = node_from(j.at("right"), depth + 1, nodes);
    auto& n = nodes[static_cast<std::size_t>(id)];
    n.feature = feature;
    n.threshold = threshold;
    n.left = l;
    n.right = r;
  }
  return id;
}

Json tree_body(const ml::TreeModel& model) {
  Json j;
  j["feature_names"] = model.feature_names;
  j["n_features"] = model.n_features;
  j["n_classes"] = model.n_classes;
  j["depth"] = model.depth();
  j["leaves"] = model.leaf_count();
  j["root"] = node_json(model, 0);
  return j;
}

ml::TreeModel tree_body_from(const Json& j) {
  ml::TreeModel model;
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.n_features = j.at("n_features").get<std::size_t>();
  model.n_classes = j.at("n_classes").get<int>();
  node_from(j.at("root"), 0, model.nodes);
  return model;
}

}  // namespace

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw SchemaError("expected a number, found '" + s + "'");
  }
  return j.get<double>();
}

Json to_json(const ingest::LoadReport& report) {
  Json files = Json::array();
  for (const auto& f : report.files) {
    Json j;
    j["name"] = f.name;
    j["rows"] = f.rows;
    j["imputations"] = f.imputations;
    j["dropped_rows"] = f.dropped_rows;
    j["warnings"] = f.warnings;
    files.push_back(std::move(j));
  }
  Json out;
  out["tables"] = report.files.size();
  out["files"] = std::move(files);
  return out;
}

Json to_json(const stats::CorrelationMatrix& cm) {
  Json j;
  j["labels"] = cm.labels;
  j["matrix"] = matrix_json(cm.M);
  Json influence = Json::object();
  for (std::size_t i = 0; i + 1 < cm.labels.size(); ++i) influence[cm.labels[i]] = number(cm.with_level(i));
  j["correlation_with_level"] = std::move(influence);
  j["constant_columns"] = cm.constant_columns;
  return j;
}

Json to_json(const std::vector<stats::FeatureScore>& scores) {
  Json out = Json::array();
  std::size_t rank = 1;
  for (const auto& s : scores) {
    Json j;
    j["rank"] = rank++;
    j["name"] = s.name;
    j["pearson_r"] = number(s.pearson_r);
    j["info_gain"] = number(s.info_gain);
    j["t_value"] = number(s.t_value);
    j["p_value"] = number(s.p_value);
    out.push_back(std::move(j));
  }
  return out;
}

Json to_json(const ml::SplitResult& split) {
  Json j;
  j["seed"] = split.seed;
  j["stratified"] = split.stratified;
  j["train_size"] = split.train_indices.size();
  j["test_size"] = split.test_indices.size();
  Json train = Json::object(), test = Json::object();
  for (Level l : kAllLevels) {
    train[std::string(level_name(l))] = split.train_counts[static_cast<std::size_t>(level_code(l) - 1)];
    test[std::string(level_name(l))] = split.test_counts[static_cast<std::size_t>(level_code(l) - 1)];
  }
  j["train_counts"] = std::move(train);
  j["test_counts"] = std::move(test);
  return j;
}

Json to_json(const eval::ConfusionMatrix& cm) {
  Json j;
  j["axes"] = "rows=actual, columns=predicted";
  j["labels"] = cm.class_labels;
  j["counts"] = cm.counts;
  j["total"] = cm.total();
  return j;
}

Json to_json(const eval::MetricsReport& m) {
  Json j;
  j["evaluated_on"] = m.evaluated_on;
  j["accuracy"] = number(m.accuracy);
  j["macro_precision"] = number(m.macro_precision);
  j["macro_recall"] = number(m.macro_recall);
  j["macro_f1"] = number(m.macro_f1);
  Json per = Json::array();
  for (const auto& c : m.per_class) {
    Json e;
    e["label"] = c.label;
    e["precision"] = number(c.precision);
    e["recall"] = number(c.recall);
    e["f1"] = number(c.f1);
    e["support"] = c.support;
    per.push_back(std::move(e));
  }
  j["per_class"] = std::move(per);
  j["warnings"] = m.warnings;
  return j;
}

Json model_header(std::string_view kind) {
  Json j;
  j["format"] = kModelFormat;
  j["version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

Json to_json(const ml::TreeModel& model) {
  Json j = model_header("decision_tree");
  j.update(tree_body(model));
  return j;
}

Json to_json(const ml::ForestModel& model) {
  Json j = model_header("random_forest");
  j["seed"] = model.seed;
  j["n_trees"] = model.trees.size();
  j["max_features"] = model.max_features;
  j["bootstrap"] = model.bootstrap;
  j["n_classes"] = model.n_classes;
  j["tree_seeds"] = model.tree_seeds;
  Json trees = Json::array();
  for (const auto& t : model.trees) trees.push_back(tree_body(t));
  j["trees"] = std::move(trees);
  return j;
}

Json to_json(const ml::PcaModel& model) {
  Json j = model_header("pca");
  j["means"] = vector_json(model.means);
  j["stds"] = vector_json(model.stds);
  j["components"] = matrix_json(model.components);
  j["explained_variance"] = vector_json(model.explained_variance);
  j["eigenvalues"] = vector_json(model.eigenvalues);
  return j;
}

Json to_json(const ml::SvmModel& model) {
  Json j = model_header("linear_svm_ovr");
  j["C"] = number(model.params.C);
  j["epochs"] = model.params.epochs;
  j["learning_rate"] = number(model.params.learning_rate);
  j["seed"] = model.params.seed;
  j["classes"] = model.classes;
  Json w = Json::array();
  for (const auto& v : model.weights) w.push_back(vector_json(v));
  j["weights"] = std::move(w);
  j["biases"] = vector_json(model.biases);
  Json final_objective = Json::array();
  for (const auto& h : model.objective_history) final_objective.push_back(number(h.back()));
  j["final_objective"] = std::move(final_objective);
  return j;
}

Json to_json(const ml::KMeansModel& model) {
  Json j = model_header("kmeans");
  j["k"] = model.k;
  j["centroids"] = matrix_json(model.centroids);
  j["inertia"] = number(model.inertia);
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["inertia_history"] = vector_json(model.inertia_history);
  j["assignments"] = model.assignments;
  return j;
}

ml::TreeModel tree_from_json(const Json& j) {
  check_header(j, "decision_tree");
  return tree_body_from(j);
}

ml::ForestModel forest_from_json(const Json& j) {
  check_header(j, "random_forest");
  ml::ForestModel model;
  model.seed = j.at("seed").get<std::uint64_t>();
  model.max_features = j.at("max_features").get<std::size_t>();
  model.bootstrap = j.at("bootstrap").get<bool>();
  model.n_classes = j.at("n_classes").get<int>();
  model.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
  for (const auto& t : j.at("trees")) model.trees.push_back(tree_body_from(t));
  return model;
}

ml::PcaModel pca_from_json(const Json& j) {
  check_header(j, "pca");
  ml::PcaModel model;
  model.means = vector_from(j.at("means"));
  model.stds = vector_from(j.at("stds"));
  model.components = matrix_from(j.at("components"));
  model.explained_variance = vector_from(j.at("explained_variance"));
  model.eigenvalues = vector_from(j.at("eigenvalues"));
  return model;
}

ml::SvmModel svm_from_json(const Json& j) {
  check_header(j, "linear_svm_ovr");
  ml::SvmModel model;
  model.params.C = number_from(j.at("C"));
  model.params.epochs = j.at("epochs").get<int>();
  model.params.learning_rate = number_from(j.at("learning_rate"));
  model.params.seed = j.at("seed").get<std::uint64_t>();
  model.classes = j.at("classes").get<std::vector<int>>();
  for (const auto& w : j.at("weights")) model.weights.push_back(vector_from(w));
  model.biases = vector_from(j.at("biases"));
  return model;
}

ml::KMeansModel kmeans_from_json(const Json& j) {
  check_header(j, "kmeans");
  ml::KMeansModel model;
  model.k = j.at("k").get<std::size_t>();
  model.centroids = matrix_from(j.at("centroids"));
  model.inertia = number_from(j.at("inertia"));
  model.iterations = j.at("iterations").get<int>();
  model.converged = j.at("converged").get<bool>();
  model.inertia_history = vector_from(j.at("inertia_history"));
  model.assignments = j.at("assignments").get<std::vector<std::size_t>>();
  return model;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw SchemaError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace lungrisk::report
