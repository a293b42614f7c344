#include "lungrisk/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lungrisk/csv.hpp"
#include "lungrisk/errors.hpp"
#include "lungrisk/eval.hpp"
#include "lungrisk/features.hpp"
#include "lungrisk/ingest.hpp"
#include "lungrisk/ml/forest.hpp"
#include "lungrisk/ml/kmeans.hpp"
#include "lungrisk/ml/pca.hpp"
#include "lungrisk/ml/split.hpp"
#include "lungrisk/ml/svm.hpp"
#include "lungrisk/ml/tree.hpp"
#include "lungrisk/report/json_io.hpp"
#include "lungrisk/report/svg.hpp"
#include "lungrisk/stats.hpp"
#include "lungrisk/synth.hpp"

namespace lungrisk::cli {

namespace fs = std::filesystem;
using report::Json;

namespace {

// File names inside the output directory.
constexpr const char* kPatientsCsv = "patients.csv";
constexpr const char* kIncidenceCsv = "incidence.csv";
constexpr const char* kForestCsv = "forest.csv";
constexpr const char* kLossCsv = "tree_cover_loss.csv";
constexpr const char* kLoadReport = "load_report.json";
constexpr const char* kConfigEcho = "config.json";
constexpr const char* kTimings = "timings.json";

struct Context {
  PipelineConfig cfg;
  std::ostream& out;
  std::ostream& err;

  fs::path dir() const { return fs::path(cfg.out); }
  fs::path at(const std::string& name) const { return dir() / name; }
};

ingest::FileReport file_report(const fs::path& path) {
  ingest::FileReport rep;
  rep.name = path.string();
  return rep;
}

void emit(const Context& ctx, const std::string& name, std::string_view contents) {
  report::write_atomic(ctx.at(name), contents);
}

void emit_json(const Context& ctx, const std::string& name, const Json& j) {
  emit(ctx, name, report::dump(j));
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(ingest::read_file(path));
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": invalid JSON: " + e.what());
  }
}

void record_timing(const Context& ctx, const std::string& step, double seconds) {
  Json timings = Json::object();
  if (fs::exists(ctx.at(kTimings))) timings = read_json(ctx.at(kTimings));
  timings[step] = seconds;
  emit_json(ctx, kTimings, timings);
}

stats::Contrast contrast_of(const PipelineConfig& cfg) {
  const auto key = csv::to_lower(cfg.contrast);
  if (key == "regression") return stats::Contrast::Regression;
  if (key == "high-vs-low" || key == "high_vs_low") return stats::Contrast::HighVsLow;
  throw AnalysisError("unknown contrast '" + cfg.contrast + "' (regression | high-vs-low)");
}

ingest::PatientTable load_patients(const Context& ctx) {
  const auto path = ctx.at(kPatientsCsv);
  if (!fs::exists(path)) {
    throw AnalysisError("no ingested patient table at " + path.string() +
                        "; run `ingest --patients <file>` first");
  }
  auto rep = file_report(path.string());
  auto table = ingest::parse_patient_csv(ingest::read_file(path), &rep);
  if (table.missing_cells() > 0) {
    table = ingest::impute_missing(table, *ingest::impute_strategy_from_name(ctx.cfg.impute), &rep);
  }
  return table;
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.patients.empty() && cfg.incidence.empty() && cfg.forest.empty() && cfg.loss.empty()) {
    ctx.err << "ingest: give at least one of --patients, --incidence, --forest, --loss\n";
    return kUsage;
  }
  const auto strategy = ingest::impute_strategy_from_name(cfg.impute);
  if (!strategy) {
    ctx.err << "ingest: unknown imputation strategy '" << cfg.impute << "'\n";
    return kUsage;
  }
  for (const auto* p : {&cfg.patients, &cfg.incidence, &cfg.forest, &cfg.loss}) {
    if (!p->empty() && !fs::exists(*p)) throw SchemaError("input file not found: " + *p);
  }

  ingest::LoadReport load;
  if (!cfg.patients.empty()) {
    auto rep = file_report(cfg.patients);
    auto table = ingest::parse_patient_csv(ingest::read_file(cfg.patients), &rep);
    table = ingest::impute_missing(table, *strategy, &rep);
    emit(ctx, kPatientsCsv, ingest::to_csv(table));
    load.files.push_back(std::move(rep));
  }
  if (!cfg.incidence.empty()) {
    auto rep = file_report(cfg.incidence);
    auto rows = ingest::parse_yearly_incidence(ingest::read_file(cfg.incidence), &rep);
    emit(ctx, kIncidenceCsv, ingest::to_csv(rows));
    load.files.push_back(std::move(rep));
  }
  if (!cfg.forest.empty()) {
    auto rep = file_report(cfg.forest);
    auto rows = ingest::parse_forest_status(ingest::read_file(cfg.forest), &rep);
    emit(ctx, kForestCsv, ingest::to_csv(rows));
    load.files.push_back(std::move(rep));
  }
  if (!cfg.loss.empty()) {
    auto rep = file_report(cfg.loss);
    auto rows = ingest::parse_tree_cover_loss(ingest::read_file(cfg.loss), cfg.iso, &rep);
    emit(ctx, kLossCsv, ingest::to_csv(rows));
    load.files.push_back(std::move(rep));
  }
  emit_json(ctx, kLoadReport, report::to_json(load));
  for (const auto& f : load.files) {
    ctx.out << f.name << ": " << f.rows << " rows, " << f.imputations << " imputations, "
            << f.warnings.size() << " warnings\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- analyze

void analyze_corr(const Context& ctx, const features::FeatureMatrix& fm) {
  const auto cm = stats::pearson_matrix(fm);
  emit_json(ctx, "correlation.json", report::to_json(cm));
  std::ostringstream csv_out;
  csv::Row header{""};
  header.insert(header.end(), cm.labels.begin(), cm.labels.end());
  csv_out << csv::format_row(header) << '\n';
  for (std::size_t i = 0; i < cm.labels.size(); ++i) {
    csv::Row row{cm.labels[i]};
    for (double v : cm.M.row(i)) row.push_back(ingest::format_number(v));
    csv_out << csv::format_row(row) << '\n';
  }
  emit(ctx, "correlation.csv", csv_out.str());
  if (ctx.cfg.charts) {
    emit(ctx, "heatmap.svg", report::heatmap_svg(cm, "Correlation heatmap (Level = encoded severity)"));
  }
  ctx.out << "correlation matrix: " << cm.labels.size() << " x " << cm.labels.size() << '\n';
}

void analyze_scores(const Context& ctx, const features::FeatureMatrix& fm, bool chart) {
  const auto contrast = contrast_of(ctx.cfg);
  const auto scores = stats::rank_features(fm, contrast);
  Json j;
  j["contrast"] = contrast == stats::Contrast::Regression ? "regression" : "high-vs-low";
  j["entropy_unit"] = "bits";
  j["scores"] = report::to_json(scores);
  emit_json(ctx, "feature_scores.json", j);

  std::ostringstream csv_out;
  csv_out << "rank,name,pearson_r,info_gain,t_value,p_value\n";
  std::size_t rank = 1;
  for (const auto& s : scores) {
    csv_out << rank++ << ',' << csv::escape(s.name) << ',' << ingest::format_number(s.pearson_r) << ','
            << ingest::format_number(s.info_gain) << ',' << ingest::format_number(s.t_value) << ','
            << ingest::format_number(s.p_value) << '\n';
  }
  emit(ctx, "feature_scores.csv", csv_out.str());

  if (chart && ctx.cfg.charts) {
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& s : scores) {
      names.push_back(s.name);
      values.push_back(s.info_gain);
    }
    emit(ctx, "infogain.svg",
         report::bar_chart_svg(names, values, "Information gain per feature", "information gain (bits)"));
  }
  ctx.out << "feature scores: " << scores.size() << " features, top = " << scores.front().name << '\n';
}

int analyze_spearman(const Context& ctx) {
  const auto incidence_path = ctx.at(kIncidenceCsv);
  const auto loss_path = ctx.at(kLossCsv);
  if (!fs::exists(incidence_path) || !fs::exists(loss_path)) {
    throw AnalysisError("spearman needs ingested --incidence and --loss tables");
  }
  const auto incidence = ingest::parse_yearly_incidence(ingest::read_file(incidence_path));
  const auto loss = ingest::parse_tree_cover_loss(ingest::read_file(loss_path), ctx.cfg.iso);

  features::YearlySeries cases{"cases", {}, {}};
  for (const auto& r : incidence) {
    cases.years.push_back(r.year);
    cases.values.push_back(static_cast<double>(r.cases));
  }
  features::YearlySeries loss_ha{"loss_ha", {}, {}};
  features::YearlySeries co2{"co2e_mg", {}, {}};
  for (const auto& r : loss) {
    loss_ha.years.push_back(r.year);
    loss_ha.values.push_back(r.loss_ha);
    co2.years.push_back(r.year);
    co2.values.push_back(r.co2e_mg);
  }
  const std::vector<features::YearlySeries> inputs{cases, loss_ha, co2};
  features::YearJoinedSeries joined;
  try {
    joined = features::join_by_year(inputs, {ctx.cfg.interpolate_years});
  } catch (const AnalysisError& e) {
    ctx.err << "analyze spearman: " << e.what() << '\n';
    return kPrecondition;
  }

  Json j;
  j["join"] = ctx.cfg.interpolate_years ? "interpolated" : "inner";
  j["n"] = joined.years.size();
  j["years"] = joined.years;
  Json coefficients = Json::array();
  Json warnings = Json::array();
  for (const char* x : {"loss_ha", "co2e_mg"}) {
    stats::Warnings w;
    Json c;
    c["x"] = x;
    c["y"] = "cases";
    c["n"] = joined.years.size();
    if (joined.years.size() >= 2) {
      c["rho"] = report::number(stats::spearman(joined.column(x), joined.column("cases"), &w));
    } else {
      c["rho"] = report::number(0.0);
      w.push_back("only one joined year; correlation set to 0");
    }
    for (auto& s : w) warnings.push_back(std::string(x) + ": " + s);
    coefficients.push_back(std::move(c));
  }
  j["coefficients"] = std::move(coefficients);
  j["warnings"] = std::move(warnings);
  emit_json(ctx, "spearman.json", j);

  std::ostringstream csv_out;
  csv_out << "year";
  for (const auto& name : joined.names) csv_out << ',' << name;
  csv_out << '\n';
  for (std::size_t i = 0; i < joined.years.size(); ++i) {
    csv_out << joined.years[i];
    for (const auto& col : joined.columns) csv_out << ',' << ingest::format_number(col[i]);
    csv_out << '\n';
  }
  emit(ctx, "joined_years.csv", csv_out.str());
  for (const auto& c : j["coefficients"]) {
    ctx.out << "spearman(" << c["x"].get<std::string>() << ", cases) = " << c["rho"].dump()
            << " over n = " << c["n"].get<std::size_t>() << " years\n";
  }
  return kOk;
}

int cmd_analyze(const Context& ctx, const std::string& which) {
  static const std::vector<std::string> kChoices = {"corr", "infogain", "ttest", "spearman", "all"};
  if (std::find(kChoices.begin(), kChoices.end(), which) == kChoices.end()) {
    ctx.err << "analyze: unknown analysis '" << which << "' (corr | infogain | ttest | spearman | all)\n";
    return kUsage;
  }
  if (which != "spearman") {
    const auto fm = features::to_feature_matrix(load_patients(ctx));
    if (which == "corr" || which == "all") analyze_corr(ctx, fm);
    if (which == "infogain" || which == "ttest" || which == "all") {
      analyze_scores(ctx, fm, which != "ttest");
    }
  }
  if (which == "spearman" || which == "all") {
    if (which == "all" && !fs::exists(ctx.at(kIncidenceCsv))) return kOk;
    return analyze_spearman(ctx);
  }
  return kOk;
}

// ---------------------------------------------------------------- train

Json evaluation_json(const eval::ConfusionMatrix& cm, const eval::MetricsReport& m) {
  Json j;
  j["confusion"] = report::to_json(cm);
  j["metrics"] = report::to_json(m);
  return j;
}

void write_evaluation(const Context& ctx, const std::string& model, const ml::SplitResult& split,
                      std::span<const int> actual, std::span<const int> predicted, Json extra = {}) {
  const auto cm = eval::confusion(actual, predicted);
  const auto m = eval::metrics(cm, "test split");
  Json j;
  j["model"] = model;
  j["split"] = report::to_json(split);
  j.update(evaluation_json(cm, m));
  if (!extra.is_null()) j.update(extra);
  emit_json(ctx, "metrics_" + model + ".json", j);
  emit(ctx, "confusion_" + model + ".csv", eval::to_csv(cm));
  ctx.out << model << ": test accuracy " << report::fixed(m.accuracy, 4) << " on "
          << actual.size() << " rows\n";
}

std::vector<int> pick(std::span<const int> values, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(values[i]);
  return out;
}

int cmd_train(const Context& ctx, const std::string& model) {
  static const std::vector<std::string> kChoices = {"dt", "rf", "svm", "kmeans", "all"};
  if (std::find(kChoices.begin(), kChoices.end(), model) == kChoices.end()) {
    ctx.err << "train: unknown model '" << model << "' (dt | rf | svm | kmeans | all)\n";
    return kUsage;
  }
  const auto& cfg = ctx.cfg;
  const auto fm = features::to_feature_matrix(load_patients(ctx));
  const auto split = ml::split(fm.y, cfg.split_ratio, cfg.seed, cfg.stratified);
  emit_json(ctx, "split.json", report::to_json(split));
  const Matrix X_train = fm.X.select_rows(split.train_indices);
  const Matrix X_test = fm.X.select_rows(split.test_indices);
  const auto y_train = pick(fm.y, split.train_indices);
  const auto y_test = pick(fm.y, split.test_indices);
  const bool all = model == "all";

  if (model == "dt" || all) {
    ml::TreeParams params;
    if (cfg.tree_max_depth > 0) params.max_depth = cfg.tree_max_depth;
    params.min_samples_split = cfg.tree_min_samples_split;
    const auto tree = ml::fit_tree(X_train, y_train, params, fm.column_names);
    emit_json(ctx, "model_dt.json", report::to_json(tree));
    Json extra;
    const auto& root = tree.nodes.front();
    if (!root.is_leaf()) {
      extra["root_split"] = {{"feature", fm.column_names[static_cast<std::size_t>(root.feature)]},
                             {"threshold", report::number(root.threshold)},
                             {"samples", root.samples}};
    }
    extra["depth"] = tree.depth();
    extra["leaves"] = tree.leaf_count();
    write_evaluation(ctx, "dt", split, y_test, tree.predict(X_test), extra);
  }
  if (model == "rf" || all) {
    ml::ForestParams params;
    params.n_trees = cfg.forest_trees;
    params.max_features = cfg.forest_max_features;
    params.bootstrap = cfg.forest_bootstrap;
    params.seed = cfg.seed;
    if (cfg.tree_max_depth > 0) params.max_depth = cfg.tree_max_depth;
    params.min_samples_split = cfg.tree_min_samples_split;
    params.threads = cfg.threads;
    const auto forest = ml::fit_forest(X_train, y_train, params, fm.column_names);
    emit_json(ctx, "model_rf.json", report::to_json(forest));
    write_evaluation(ctx, "rf", split, y_test, forest.predict(X_test),
                     Json{{"n_trees", forest.trees.size()}, {"max_features", forest.max_features}});
  }
  if (model == "svm" || all) {
    const auto pca = ml::fit_pca(cfg.pca_on_all ? fm.X : X_train, 2);
    const Matrix P_train = pca.transform(X_train);
    const Matrix P_test = pca.transform(X_test);
    ml::SvmParams params;
    params.C = cfg.svm_c;
    params.epochs = cfg.svm_epochs;
    params.learning_rate = cfg.svm_learning_rate;
    params.seed = cfg.seed;
    const auto svm = ml::fit_svm(P_train, y_train, params);
    Json doc = report::model_header("pca_svm");
    doc["pca_fitted_on"] = cfg.pca_on_all ? "full dataset" : "training split";
    doc["pca"] = report::to_json(pca);
    doc["svm"] = report::to_json(svm);
    emit_json(ctx, "model_svm.json", doc);
    Json extra;
    extra["pca_fitted_on"] = doc["pca_fitted_on"];
    extra["explained_variance"] = Json::array({report::number(pca.explained_variance[0]),
                                               report::number(pca.explained_variance[1])});
    write_evaluation(ctx, "svm", split, y_test, svm.predict(P_test), extra);
    if (cfg.charts) {
      emit(ctx, "pca_scatter.svg",
           report::scatter_svg(pca.transform(fm.X), fm.y, "Patients in 2-D PCA space", "PCA Component 1",
                               "PCA Component 2"));
      emit(ctx, "svm_boundary.svg",
           report::scatter_svg(P_test, y_test, "Linear SVM decision regions (test split)",
                               "PCA Component 1", "PCA Component 2", &svm));
    }
  }
  if (model == "kmeans" || all) {
    const auto standardization = features::standardize(fm.X);
    const auto space = csv::to_lower(cfg.kmeans_space);
    if (space != "standardized" && space != "pca") {
      throw AnalysisError("unknown kmeans space '" + cfg.kmeans_space + "' (standardized | pca)");
    }
    const auto projection = ml::fit_pca(fm.X, 2);
    const Matrix points = space == "pca" ? projection.transform(fm.X) : standardization.Z;
    ml::KMeansParams params;
    params.k = cfg.kmeans_k;
    params.seed = cfg.seed;
    params.max_iter = cfg.kmeans_max_iter;
    params.tol = cfg.kmeans_tol;
    const auto km = ml::fit_kmeans(points, params);

    Json metrics_doc;
    metrics_doc["model"] = "kmeans";
    metrics_doc["evaluated_on"] = "full dataset";
    metrics_doc["space"] = space;
    metrics_doc["inertia"] = report::number(km.inertia);
    metrics_doc["iterations"] = km.iterations;
    Json mappings = Json::object();
    for (auto mode : {ml::ClusterMapping::Raw, ml::ClusterMapping::Majority}) {
      if (mode == ml::ClusterMapping::Raw && km.k != static_cast<std::size_t>(kNumLevels)) continue;
      const auto mapping = ml::map_clusters(km, fm.y, mode, kNumLevels);
      std::vector<int> predicted;
      predicted.reserve(km.assignments.size());
      for (auto a : km.assignments) predicted.push_back(mapping[a]);
      const auto cm = eval::confusion(fm.y, predicted);
      const auto m = eval::metrics(cm, "full dataset");
      Json entry = evaluation_json(cm, m);
      entry["cluster_to_class"] = mapping;
      mappings[std::string(ml::cluster_mapping_name(mode))] = std::move(entry);
      ctx.out << "kmeans (" << ml::cluster_mapping_name(mode) << " mapping): accuracy "
              << report::fixed(m.accuracy, 4) << " on " << predicted.size() << " rows\n";
      if (mode == ml::ClusterMapping::Raw) emit(ctx, "confusion_kmeans.csv", eval::to_csv(cm));
    }
    metrics_doc["mappings"] = std::move(mappings);
    emit_json(ctx, "metrics_kmeans.json", metrics_doc);

    Json doc = report::model_header("kmeans_pipeline");
    doc["space"] = space;
    doc["means"] = Json::array();
    doc["stds"] = Json::array();
    for (double v : standardization.means) doc["means"].push_back(report::number(v));
    for (double v : standardization.stds) doc["stds"].push_back(report::number(v));
    if (space == "pca") doc["pca"] = report::to_json(projection);
    doc["kmeans"] = report::to_json(km);
    emit_json(ctx, "model_kmeans.json", doc);
    if (cfg.charts) {
      std::vector<int> clusters;
      for (auto a : km.assignments) clusters.push_back(static_cast<int>(a) + 1);
      emit(ctx, "kmeans_scatter.svg",
           report::scatter_svg(projection.transform(fm.X), clusters, "K-means clusters in 2-D PCA space",
                               "PCA Component 1", "PCA Component 2"));
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Context& ctx, std::size_t n, const std::string& profile, const std::string& output) {
  synth::EffectProfile effects;
  try {
    effects = synth::parse_profile(profile);
  } catch (const AnalysisError& e) {
    ctx.err << "synth: " << e.what() << '\n';
    return kUsage;
  }
  if (n < 10) {
    ctx.err << "synth: --n must be at least 10\n";
    return kUsage;
  }
  const auto table = synth::generate(n, effects, ctx.cfg.seed);
  const fs::path path = output.empty() ? ctx.at("synth_patients.csv") : fs::path(output);
  report::write_atomic(path, ingest::to_csv(table));
  ctx.out << "wrote " << n << " synthetic patients to " << path.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- report

int cmd_report(const Context& ctx) {
  Json j;
  j["format"] = report::kReportFormat;
  j["version"] = report::kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["config"] = fs::exists(ctx.at(kConfigEcho)) ? read_json(ctx.at(kConfigEcho)) : to_json(ctx.cfg);
  auto add = [&](const char* key, const std::string& file) {
    if (fs::exists(ctx.at(file))) j[key] = read_json(ctx.at(file));
  };
  add("load_report", kLoadReport);
  add("split", "split.json");
  Json analyses = Json::object();
  for (const char* name : {"correlation", "feature_scores", "spearman"}) {
    const std::string file = std::string(name) + ".json";
    if (fs::exists(ctx.at(file))) analyses[name] = read_json(ctx.at(file));
  }
  j["analyses"] = std::move(analyses);
  Json models = Json::object();
  for (const char* name : {"dt", "rf", "svm", "kmeans"}) {
    const std::string file = std::string("metrics_") + name + ".json";
    if (fs::exists(ctx.at(file))) models[name] = read_json(ctx.at(file));
  }
  j["models"] = std::move(models);
  add("timings", kTimings);
  emit_json(ctx, "run_report.json", j);
  ctx.out << "wrote " << ctx.at("run_report.json").string() << '\n';
  return kOk;
}

int guarded(const Context& ctx, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    ctx.err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const SchemaError& e) {
    ctx.err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const fs::filesystem_error& e) {
    ctx.err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const AnalysisError& e) {
    ctx.err << "analysis error: " << e.what() << '\n';
    return kPrecondition;
  }
}

}  // namespace

Json to_json(const PipelineConfig& c) {
  Json j;
  j["patients"] = c.patients;
  j["incidence"] = c.incidence;
  j["forest"] = c.forest;
  j["loss"] = c.loss;
  j["iso"] = c.iso;
  j["out"] = c.out;
  j["seed"] = c.seed;
  j["split_ratio"] = c.split_ratio;
  j["stratified"] = c.stratified;
  j["pca_on_all"] = c.pca_on_all;
  j["interpolate_years"] = c.interpolate_years;
  j["contrast"] = c.contrast;
  j["impute"] = c.impute;
  j["tree_max_depth"] = c.tree_max_depth;
  j["tree_min_samples_split"] = c.tree_min_samples_split;
  j["forest_trees"] = c.forest_trees;
  j["forest_max_features"] = c.forest_max_features;
  j["forest_bootstrap"] = c.forest_bootstrap;
  j["threads"] = c.threads;
  j["svm_c"] = c.svm_c;
  j["svm_epochs"] = c.svm_epochs;
  j["svm_learning_rate"] = c.svm_learning_rate;
  j["kmeans_k"] = c.kmeans_k;
  j["kmeans_max_iter"] = c.kmeans_max_iter;
  j["kmeans_tol"] = c.kmeans_tol;
  j["kmeans_space"] = c.kmeans_space;
  j["charts"] = c.charts;
  return j;
}

void merge_json(PipelineConfig& c, const Json& j) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  const Json known = to_json(c);
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw SchemaError("unknown config key '" + key + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    get("patients", c.patients);
    get("incidence", c.incidence);
    get("forest", c.forest);
    get("loss", c.loss);
    get("iso", c.iso);
    get("out", c.out);
    get("seed", c.seed);
    get("split_ratio", c.split_ratio);
    get("stratified", c.stratified);
    get("pca_on_all", c.pca_on_all);
    get("interpolate_years", c.interpolate_years);
    get("contrast", c.contrast);
    get("impute", c.impute);
    get("tree_max_depth", c.tree_max_depth);
    get("tree_min_samples_split", c.tree_min_samples_split);
    get("forest_trees", c.forest_trees);
    get("forest_max_features", c.forest_max_features);
    get("forest_bootstrap", c.forest_bootstrap);
    get("threads", c.threads);
    get("svm_c", c.svm_c);
    get("svm_epochs", c.svm_epochs);
    get("svm_learning_rate", c.svm_learning_rate);
    get("kmeans_k", c.kmeans_k);
    get("kmeans_max_iter", c.kmeans_max_iter);
    get("kmeans_tol", c.kmeans_tol);
    get("kmeans_space", c.kmeans_space);
    get("charts", c.charts);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("bad config value: ") + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lungrisk: lung-cancer risk analytics pipeline", "lungrisk"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config_path;
  std::optional<std::string> patients, incidence, forest, loss, iso, out_dir, contrast, impute, kmeans_space;
  std::optional<std::uint64_t> seed;
  std::optional<double> split_ratio, svm_c, svm_lr, kmeans_tol;
  std::optional<int> max_depth, svm_epochs, kmeans_max_iter;
  std::optional<std::size_t> min_split, trees, max_features, kmeans_k;
  std::optional<unsigned> threads;
  bool stratified = false, pca_on_all = false, interpolate = false, no_bootstrap = false, no_charts = false;

  app.add_option("--config", config_path, "JSON config file; command-line flags override it")
      ->check(CLI::ExistingFile);
  app.add_option("--patients", patients, "patient CSV (Patient Id, Age, Gender, ..., Level)");
  app.add_option("--incidence", incidence, "yearly incidence CSV (Year, Number, Total, Rate)");
  app.add_option("--forest", forest, "forest status CSV (Year, Total/Natural/Planted)");
  app.add_option("--loss", loss, "tree cover loss CSV (iso, year, loss ha, CO2e Mg)");
  app.add_option("--iso", iso, "country filter for the tree cover loss table");
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("--seed", seed, "PRNG seed for split, forest, SVM, k-means and synth");
  app.add_option("--split-ratio", split_ratio, "training fraction");
  app.add_flag("--stratified", stratified, "stratify the split by level");
  app.add_flag("--pca-on-all", pca_on_all, "fit PCA on all rows instead of the training split");
  app.add_flag("--interpolate-years", interpolate, "align yearly series by linear interpolation");
  app.add_option("--contrast", contrast, "t statistic: regression | high-vs-low");
  app.add_option("--impute", impute, "median | mode | drop_row");
  app.add_option("--max-depth", max_depth, "tree depth limit (0 = unlimited)");
  app.add_option("--min-samples-split", min_split, "smallest node that may be split");
  app.add_option("--trees", trees, "random forest size");
  app.add_option("--max-features", max_features, "features per split (0 = floor(sqrt(d)))");
  app.add_flag("--no-bootstrap", no_bootstrap, "train forest trees on the full training split");
  app.add_option("--threads", threads, "forest training threads (results are identical)");
  app.add_option("--svm-c", svm_c, "SVM regularization constant C");
  app.add_option("--svm-epochs", svm_epochs, "SVM training epochs");
  app.add_option("--svm-learning-rate", svm_lr, "SVM initial step size");
  app.add_option("--k", kmeans_k, "number of k-means clusters");
  app.add_option("--kmeans-max-iter", kmeans_max_iter, "Lloyd iteration cap");
  app.add_option("--kmeans-tol", kmeans_tol, "centroid shift tolerance");
  app.add_option("--kmeans-space", kmeans_space, "standardized | pca");
  app.add_flag("--no-charts", no_charts, "skip SVG output");

  auto* ingest_cmd = app.add_subcommand("ingest", "parse, clean and impute the input tables");
  std::string which = "all";
  auto* analyze_cmd = app.add_subcommand("analyze", "correlation, information gain, t-tests, Spearman");
  analyze_cmd->add_option("which", which, "corr | infogain | ttest | spearman | all");
  std::string model;
  auto* train_cmd = app.add_subcommand("train", "train and evaluate a model");
  train_cmd->add_option("model", model, "dt | rf | svm | kmeans | all")->required();
  std::size_t synth_n = 1000;
  std::string synth_profile = "planted";
  std::string synth_output;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic patient CSV");
  synth_cmd->add_option("-n,--n", synth_n, "number of patients (>= 10)");
  synth_cmd->add_option("--profile", synth_profile, "planted | none | 'Name=weight,Name=weight'");
  synth_cmd->add_option("--output", synth_output, "CSV path (default <out>/synth_patients.csv)");
  auto* report_cmd = app.add_subcommand("report", "collect all results into run_report.json");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kUsage;
  }

  Context ctx{PipelineConfig{}, out, err};
  const int config_status = guarded(ctx, [&] {
    auto& c = ctx.cfg;
    if (!config_path.empty()) merge_json(c, read_json(config_path));
    if (patients) c.patients = *patients;
    if (incidence) c.incidence = *incidence;
    if (forest) c.forest = *forest;
    if (loss) c.loss = *loss;
    if (iso) c.iso = *iso;
    if (out_dir) c.out = *out_dir;
    if (seed) c.seed = *seed;
    if (split_ratio) c.split_ratio = *split_ratio;
    if (stratified) c.stratified = true;
    if (pca_on_all) c.pca_on_all = true;
    if (interpolate) c.interpolate_years = true;
    if (contrast) c.contrast = *contrast;
    if (impute) c.impute = *impute;
    if (max_depth) c.tree_max_depth = *max_depth;
    if (min_split) c.tree_min_samples_split = *min_split;
    if (trees) c.forest_trees = *trees;
    if (max_features) c.forest_max_features = *max_features;
    if (no_bootstrap) c.forest_bootstrap = false;
    if (threads) c.threads = *threads;
    if (svm_c) c.svm_c = *svm_c;
    if (svm_epochs) c.svm_epochs = *svm_epochs;
    if (svm_lr) c.svm_learning_rate = *svm_lr;
    if (kmeans_k) c.kmeans_k = *kmeans_k;
    if (kmeans_max_iter) c.kmeans_max_iter = *kmeans_max_iter;
    if (kmeans_tol) c.kmeans_tol = *kmeans_tol;
    if (kmeans_space) c.kmeans_space = *kmeans_space;
    if (no_charts) c.charts = false;
    return kOk;
  });
  if (config_status != kOk) return config_status;

  const auto started = std::chrono::steady_clock::now();
  std::string step;
  std::function<int()> body;
  if (ingest_cmd->parsed()) {
    step = "ingest";
    body = [&] { return cmd_ingest(ctx); };
  } else if (analyze_cmd->parsed()) {
    step = "analyze " + which;
    body = [&] { return cmd_analyze(ctx, which); };
  } else if (train_cmd->parsed()) {
    step = "train " + model;
    body = [&] { return cmd_train(ctx, model); };
  } else if (synth_cmd->parsed()) {
    step = "synth";
    body = [&] { return cmd_synth(ctx, synth_n, synth_profile, synth_output); };
  } else if (report_cmd->parsed()) {
    step = "report";
    body = [&] { return cmd_report(ctx); };
  }
  const int status = guarded(ctx, body);
  if (status == kOk && step != "synth" && step != "report") {
    guarded(ctx, [&] {
      // Input paths given to an earlier command in this output directory
      // stay in the echo, so the file describes the whole run.
      PipelineConfig echo = ctx.cfg;
      if (fs::exists(ctx.at(kConfigEcho))) {
        PipelineConfig previous;
        merge_json(previous, read_json(ctx.at(kConfigEcho)));
        for (auto field : {&PipelineConfig::patients, &PipelineConfig::incidence,
                           &PipelineConfig::forest, &PipelineConfig::loss}) {
          if ((echo.*field).empty()) echo.*field = previous.*field;
        }
      }
      emit_json(ctx, kConfigEcho, to_json(echo));
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      record_timing(ctx, step, elapsed.count());
      return kOk;
    });
  }
  return status;
}

}  // namespace lungrisk::cli
