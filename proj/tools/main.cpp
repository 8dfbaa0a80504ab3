#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cardioforest/csv.hpp"
#include "cardioforest/dataio.hpp"
#include "cardioforest/ensemble.hpp"
#include "cardioforest/errors.hpp"
#include "cardioforest/eval.hpp"
#include "cardioforest/explain.hpp"
#include "cardioforest/model_io.hpp"
#include "cardioforest/synth.hpp"

namespace {

using cardio::ConfigError;
using cardio::FitError;
using cardio::ParseError;
using cardio::SchemaError;
using cardio::ValueError;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitModel = 4;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  return j;
}

// Per-flag overrides from the command line; applied after config-file values
// so flags win.
struct HyperFlags {
  std::optional<int> n_estimators;
  std::optional<int> max_depth;
  std::optional<int> min_samples_split;
  std::optional<int> min_samples_leaf;
  std::optional<double> max_features;
  std::optional<double> ccp_alpha;
  std::optional<std::string> class_weight;
  std::optional<bool> bootstrap;
  std::optional<bool> oob_score;
  std::optional<double> learning_rate;
  std::optional<double> subsample;
  std::optional<double> colsample_bytree;
  std::optional<double> reg_alpha;
  std::optional<double> reg_lambda;
  std::optional<double> gamma;
  std::optional<int> min_child_samples;
  std::optional<double> validation_fraction;
  std::optional<int> n_iter_no_change;
  std::optional<double> top_rate;
  std::optional<double> other_rate;
  std::optional<int> max_bins;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--n_estimators", n_estimators);
    cmd->add_option("--max_depth", max_depth);
    cmd->add_option("--min_samples_split", min_samples_split);
    cmd->add_option("--min_samples_leaf", min_samples_leaf);
    cmd->add_option("--max_features", max_features);
    cmd->add_option("--ccp_alpha", ccp_alpha);
    cmd->add_option("--class_weight", class_weight)->check(CLI::IsMember({"balanced", "none"}));
    cmd->add_option("--bootstrap", bootstrap);
    cmd->add_option("--oob_score", oob_score);
    cmd->add_option("--learning_rate", learning_rate);
    cmd->add_option("--subsample", subsample);
    cmd->add_option("--colsample_bytree", colsample_bytree);
    cmd->add_option("--reg_alpha", reg_alpha);
    cmd->add_option("--reg_lambda", reg_lambda);
    cmd->add_option("--gamma", gamma);
    cmd->add_option("--min_child_samples", min_child_samples);
    cmd->add_option("--validation_fraction", validation_fraction);
    cmd->add_option("--n_iter_no_change", n_iter_no_change);
    cmd->add_option("--top_rate", top_rate);
    cmd->add_option("--other_rate", other_rate);
    cmd->add_option("--max_bins", max_bins);
  }
};

template <typename T>
void config_get(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

void apply_config(cardio::ForestParams& p, const json& j) {
  config_get(j, "n_estimators", p.n_estimators);
  config_get(j, "max_depth", p.tree.max_depth);
  config_get(j, "min_samples_split", p.tree.min_samples_split);
  config_get(j, "min_samples_leaf", p.tree.min_samples_leaf);
  config_get(j, "max_features", p.tree.max_features);
  config_get(j, "ccp_alpha", p.tree.ccp_alpha);
  config_get(j, "bootstrap", p.bootstrap);
  config_get(j, "oob_score", p.oob_score);
  if (j.contains("class_weight")) {
    p.balanced_class_weight = j.at("class_weight").get<std::string>() == "balanced";
  }
  config_get(j, "random_state", p.seed);
}

void apply_config(cardio::BoostParams& p, const json& j) {
  config_get(j, "n_estimators", p.n_estimators);
  config_get(j, "max_depth", p.max_depth);
  config_get(j, "learning_rate", p.learning_rate);
  config_get(j, "subsample", p.subsample);
  config_get(j, "colsample_bytree", p.colsample_bytree);
  config_get(j, "reg_alpha", p.reg_alpha);
  config_get(j, "reg_lambda", p.reg_lambda);
  config_get(j, "gamma", p.gamma);
  config_get(j, "min_child_samples", p.min_child_samples);
  config_get(j, "min_samples_split", p.min_samples_split);
  config_get(j, "min_samples_leaf", p.min_samples_leaf);
  config_get(j, "max_features", p.max_features);
  config_get(j, "validation_fraction", p.validation_fraction);
  config_get(j, "n_iter_no_change", p.n_iter_no_change);
  config_get(j, "top_rate", p.top_rate);
  config_get(j, "other_rate", p.other_rate);
  config_get(j, "max_bins", p.max_bins);
  config_get(j, "random_state", p.seed);
}

void apply_flags(cardio::ForestParams& p, const HyperFlags& f) {
  if (f.n_estimators) p.n_estimators = *f.n_estimators;
  if (f.max_depth) p.tree.max_depth = *f.max_depth;
  if (f.min_samples_split) p.tree.min_samples_split = *f.min_samples_split;
  if (f.min_samples_leaf) p.tree.min_samples_leaf = *f.min_samples_leaf;
  if (f.max_features) p.tree.max_features = *f.max_features;
  if (f.ccp_alpha) p.tree.ccp_alpha = *f.ccp_alpha;
  if (f.class_weight) p.balanced_class_weight = *f.class_weight == "balanced";
  if (f.bootstrap) p.bootstrap = *f.bootstrap;
  if (f.oob_score) p.oob_score = *f.oob_score;
}

void apply_flags(cardio::BoostParams& p, const HyperFlags& f) {
  if (f.n_estimators) p.n_estimators = *f.n_estimators;
  if (f.max_depth) p.max_depth = *f.max_depth;
  if (f.learning_rate) p.learning_rate = *f.learning_rate;
  if (f.subsample) p.subsample = *f.subsample;
  if (f.colsample_bytree) p.colsample_bytree = *f.colsample_bytree;
  if (f.reg_alpha) p.reg_alpha = *f.reg_alpha;
  if (f.reg_lambda) p.reg_lambda = *f.reg_lambda;
  if (f.gamma) p.gamma = *f.gamma;
  if (f.min_child_samples) p.min_child_samples = *f.min_child_samples;
  if (f.min_samples_split) p.min_samples_split = *f.min_samples_split;
  if (f.min_samples_leaf) p.min_samples_leaf = *f.min_samples_leaf;
  if (f.max_features) p.max_features = *f.max_features;
  if (f.validation_fraction) p.validation_fraction = *f.validation_fraction;
  if (f.n_iter_no_change) p.n_iter_no_change = *f.n_iter_no_change;
  if (f.top_rate) p.top_rate = *f.top_rate;
  if (f.other_rate) p.other_rate = *f.other_rate;
  if (f.max_bins) p.max_bins = *f.max_bins;
}

// The model's section of the config file, or the top level when flat.
json model_config_section(const json& config, const std::string& model_id) {
  if (config.contains(model_id) && config.at(model_id).is_object()) {
    return config.at(model_id);
  }
  return config;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::size_t n = 1000;
  double prevalence = 0.1546;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_synth(const SynthArgs& args) {
  cardio::SynthConfig config;
  config.n = args.n;
  config.prevalence = args.prevalence;
  config.seed = args.seed;
  const cardio::Dataset ds = cardio::generate_synthetic(config);
  const cardio::RawTable table = cardio::table_from_dataset(ds, "wct_label");
  cardio::write_table_csv_file(table, args.out);
  std::cerr << "wrote " << ds.n_rows() << " rows to " << args.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// prep

struct PrepArgs {
  std::string in;
  std::string out;
  std::string report;
  std::string keys = "subject_id,study_id";
  std::string time_columns;
  bool no_dedup = false;
  bool no_repair = false;
};

int cmd_prep(const PrepArgs& args) {
  cardio::RawTable table = cardio::parse_measurements_csv_file(args.in);
  const std::size_t rows_in = table.n_rows();

  json report;
  report["rows_in"] = rows_in;

  std::size_t duplicates_removed = 0;
  if (!args.no_dedup) {
    auto [deduped, removed] = cardio::deduplicate(table, split_list(args.keys));
    table = std::move(deduped);
    duplicates_removed = removed;
  }
  report["duplicates_removed"] = duplicates_removed;

  if (!args.time_columns.empty()) {
    table = cardio::normalize_timestamps(table, split_list(args.time_columns));
  }

  // Text cells inside numeric columns are unusable; blank them so imputation
  // can fill them.
  std::map<std::string, std::size_t> flagged;
  for (std::size_t j = 0; j < table.n_cols(); ++j) {
    if (table.non_numeric_flags[j] == 0) continue;
    std::size_t count = 0;
    for (cardio::Cell& cell : table.columns[j].cells) {
      if (cardio::cell_text(cell)) {
        cell = std::monostate{};
        ++count;
      }
    }
    flagged[table.columns[j].name] += count;
  }

  if (!args.no_repair) {
    auto [repaired, repair_counts] =
        cardio::repair_implausible(table, cardio::default_plausibility_rules());
    table = std::move(repaired);
    for (const auto& [name, count] : repair_counts) flagged[name] += count;
  }
  {
    json jf = json::object();
    for (const auto& [name, count] : flagged) jf[name] = count;
    report["flagged"] = std::move(jf);
  }

  if (!table.find_column("qrs_duration")) {
    throw SchemaError("prep: required column qrs_duration is missing");
  }

  // Median-impute the numeric columns that have gaps.
  std::vector<std::string> numeric_with_missing;
  for (const auto& col : table.columns) {
    bool any_numeric = false, any_missing = false, any_text = false;
    for (const cardio::Cell& cell : col.cells) {
      if (cardio::cell_numeric(cell)) any_numeric = true;
      else if (cardio::cell_missing(cell)) any_missing = true;
      else any_text = true;
    }
    if (any_numeric && any_missing && !any_text) numeric_with_missing.push_back(col.name);
    if (!any_numeric && any_missing && !any_text && !col.cells.empty()) {
      throw ValueError("prep: column " + col.name + " is entirely missing");
    }
  }
  json imputed = json::object();
  if (!numeric_with_missing.empty()) {
    cardio::ImputerState imputer;
    try {
      imputer = cardio::fit_impute_median(table, numeric_with_missing);
    } catch (const FitError& e) {
      throw ValueError(e.what());
    }
    auto [filled, counts] = cardio::apply_impute(table, imputer);
    table = std::move(filled);
    for (const auto& [name, count] : counts) imputed[name] = count;
  }
  report["imputed"] = std::move(imputed);

  // Label-encode the remaining text columns.
  json codecs = json::object();
  for (auto& col : table.columns) {
    bool any_text = false;
    for (const cardio::Cell& cell : col.cells) {
      if (cardio::cell_text(cell)) {
        any_text = true;
        break;
      }
    }
    if (!any_text) continue;
    std::vector<std::string> values;
    values.reserve(col.cells.size());
    for (const cardio::Cell& cell : col.cells) {
      if (!cardio::cell_text(cell)) {
        throw ValueError("prep: categorical column " + col.name + " has non-text cells");
      }
      values.push_back(std::get<std::string>(cell));
    }
    auto [codes, codec] = cardio::encode_labels(values);
    for (std::size_t i = 0; i < col.cells.size(); ++i) {
      col.cells[i] = static_cast<double>(codes[i]);
    }
    json mapping = json::object();
    for (std::size_t code = 0; code < codec.categories.size(); ++code) {
      mapping[codec.categories[code]] = code;
    }
    codecs[col.name] = std::move(mapping);
  }
  report["codec"] = std::move(codecs);

  // Derive the label column when absent.
  if (!table.find_column("wct_label")) {
    const cardio::Column& qrs = table.column("qrs_duration");
    cardio::Column label;
    label.name = "wct_label";
    label.cells.reserve(table.n_rows());
    for (const cardio::Cell& cell : qrs.cells) {
      if (!cardio::cell_numeric(cell)) {
        throw ValueError("prep: qrs_duration must be numeric to derive labels");
      }
      label.cells.emplace_back(
          static_cast<double>(cardio::derive_wct_label(std::get<double>(cell))));
    }
    table.columns.push_back(std::move(label));
    table.non_numeric_flags.push_back(0);
  }

  report["rows_out"] = table.n_rows();
  cardio::write_table_csv_file(table, args.out);

  const std::string report_path = args.report.empty() ? args.out + ".report.json" : args.report;
  std::ofstream rout(report_path, std::ios::binary);
  if (!rout) throw ParseError("cannot open report file for writing: " + report_path);
  rout << report.dump(2) << '\n';
  std::cerr << "prep: " << rows_in << " rows in, " << table.n_rows() << " rows out\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// shared pipeline helpers

cardio::Dataset load_dataset(const std::string& path, const std::vector<std::string>& features,
                             const std::string& label_column) {
  const cardio::RawTable table = cardio::parse_measurements_csv_file(path);
  return cardio::dataset_from_table(table, features, label_column);
}

std::vector<std::string> resolve_features(const std::string& csv_list) {
  if (csv_list.empty()) return cardio::standard_feature_names();
  return split_list(csv_list);
}

// Fits the preprocessing stack and returns the transformed matrix plus the
// states for the model file.
cardio::Matrix fit_preprocess(const cardio::Dataset& ds, bool prune, double prune_threshold,
                              int pca_components, cardio::Preprocess& pp,
                              std::vector<std::string>& model_features) {
  const std::size_t d = ds.n_cols();

  cardio::ImputerState imputer;
  imputer.fitted_columns = ds.feature_names;
  imputer.medians.resize(d);
  std::vector<double> values;
  for (std::size_t j = 0; j < d; ++j) {
    values.clear();
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      if (!ds.is_missing(i, j)) values.push_back(ds.features(i, j));
    }
    if (values.empty()) throw FitError("column " + ds.feature_names[j] + " is fully missing");
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    imputer.medians[j] = (m % 2 == 1) ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
  }
  pp.imputer = imputer;

  cardio::Matrix x = ds.features;
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (ds.is_missing(i, j)) x(i, j) = imputer.medians[j];
    }
  }

  const cardio::StandardizerState scaler = cardio::fit_standardize(x);
  pp.standardizer = scaler;
  x = cardio::apply_standardize(x, scaler);

  std::vector<std::size_t> kept(d);
  for (std::size_t j = 0; j < d; ++j) kept[j] = j;
  if (prune) kept = cardio::correlation_prune(x, prune_threshold);
  pp.kept_columns = kept;
  if (kept.size() != d) {
    cardio::Matrix selected(x.rows(), kept.size());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < kept.size(); ++j) selected(i, j) = x(i, kept[j]);
    }
    x = std::move(selected);
  }
  model_features.clear();
  for (const std::size_t j : kept) model_features.push_back(ds.feature_names[j]);

  if (pca_components > 0) {
    const cardio::PcaState pca = cardio::fit_pca(x, static_cast<std::size_t>(pca_components));
    pp.pca = pca;
    x = cardio::apply_pca(x, pca);
    model_features.clear();
    for (int c = 0; c < pca_components; ++c) {
      model_features.push_back("pc" + std::to_string(c + 1));
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string in;
  std::string model;
  std::string out;
  std::string label_column = "wct_label";
  std::string features;
  std::string config;
  std::optional<std::uint64_t> seed;  // wins over the config's random_state
  int threads = -1;
  bool derived = false;
  bool prune = false;
  double prune_threshold = 0.95;
  int pca = 0;
  HyperFlags hyper;
};

int cmd_train(const TrainArgs& args) {
  cardio::ModelSpec spec = cardio::ModelSpec::with_defaults(args.model);
  const json config = load_config(args.config);
  const json section = model_config_section(config, args.model);
  if (spec.is_forest()) {
    apply_config(spec.forest, section);
    apply_flags(spec.forest, args.hyper);
    if (args.seed) spec.forest.seed = *args.seed;
    spec.forest.tree.seed = spec.forest.seed;
  } else {
    apply_config(spec.boost, section);
    apply_flags(spec.boost, args.hyper);
    if (args.seed) spec.boost.seed = *args.seed;
  }

  cardio::Dataset ds = load_dataset(args.in, resolve_features(args.features), args.label_column);
  if (args.derived) ds = cardio::derive_interval_features(ds);

  cardio::Preprocess pp;
  std::vector<std::string> model_features;
  const cardio::Matrix x =
      fit_preprocess(ds, args.prune, args.prune_threshold, args.pca, pp, model_features);

  cardio::ModelFile mf;
  mf.model_type = args.model;
  mf.feature_names = model_features;
  mf.preprocess = std::move(pp);

  if (spec.is_forest()) {
    cardio::ForestModel model = cardio::fit_cardioforest(x, ds.labels, spec.forest, args.threads);
    model.feature_names = model_features;
    if (model.oob_score) std::cerr << "oob_score: " << *model.oob_score << "\n";
    mf.forest = std::move(model);
  } else {
    cardio::BoostedModel model = cardio::fit_boosted(x, ds.labels, spec.boost);
    model.feature_names = model_features;
    std::cerr << "rounds: " << model.stopped_at << "\n";
    mf.boosted = std::move(model);
  }
  cardio::save_model_file(mf, args.out);
  std::cerr << "wrote model to " << args.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string model;
  std::string in;
  std::string out;
  int threads = -1;
};

int cmd_predict(const PredictArgs& args) {
  const cardio::ModelFile mf = cardio::load_model_file(args.model);
  const std::vector<std::string> raw_features = mf.preprocess.input_feature_names();
  if (raw_features.empty()) throw FitError("model file lacks preprocess input columns");

  cardio::Dataset ds;
  cardio::Matrix x;
  try {
    ds = load_dataset(args.in, raw_features, "");
    x = cardio::apply_preprocess(mf.preprocess, ds);
  } catch (const SchemaError& e) {
    // Input incompatible with the trained model.
    throw FitError(e.what());
  }

  cardio::Prediction pred;
  try {
    if (mf.forest) {
      pred = cardio::predict_forest(*mf.forest, x, args.threads);
    } else if (mf.boosted) {
      pred = cardio::predict_boosted(*mf.boosted, x);
    } else {
      throw FitError("model file has no trees");
    }
  } catch (const SchemaError& e) {
    throw FitError(e.what());
  }

  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw ParseError("cannot open output file: " + args.out);
  out << "sample_id,probability,label\n";
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const long long sample_id =
        ds.study_ids.empty() ? static_cast<long long>(i) : ds.study_ids[i];
    out << sample_id << ',' << cardio::format_double(pred.probabilities[i]) << ','
        << pred.labels[i] << '\n';
  }
  std::cerr << "wrote predictions for " << x.rows() << " rows\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cv

struct CvArgs {
  std::string in;
  std::string models = "cardioforest,xgb,lgbm,gbm";
  std::string label_column = "wct_label";
  std::string features;
  std::string config;
  std::string out_csv;
  std::string out_json;
  int k = 10;
  std::uint64_t seed = 42;
  int threads = -1;
};

int cmd_cv(const CvArgs& args) {
  const json config = load_config(args.config);
  std::vector<cardio::ModelSpec> specs;
  for (const std::string& id : split_list(args.models)) {
    cardio::ModelSpec spec = cardio::ModelSpec::with_defaults(id);
    const json section = model_config_section(config, id);
    if (spec.is_forest()) apply_config(spec.forest, section);
    else apply_config(spec.boost, section);
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw ConfigError("cv: no models requested");

  const cardio::Dataset ds =
      load_dataset(args.in, resolve_features(args.features), args.label_column);
  const cardio::CvReport report =
      cardio::cross_validate(specs, ds, args.k, args.seed, args.threads);

  if (!args.out_csv.empty()) {
    std::ofstream out(args.out_csv, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + args.out_csv);
    out << cardio::report_csv(report);
  } else {
    std::cout << cardio::report_csv(report);
  }
  if (!args.out_json.empty()) {
    std::ofstream out(args.out_json, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + args.out_json);
    out << cardio::report_json(report);
  }
  std::cerr << "cv: " << specs.size() << " models x " << args.k << " folds\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// explain

struct ExplainArgs {
  std::string model;
  std::string in;
  std::string out;
  std::string summary;
  int threads = -1;
};

int cmd_explain(const ExplainArgs& args) {
  const cardio::ModelFile mf = cardio::load_model_file(args.model);
  const std::vector<std::string> raw_features = mf.preprocess.input_feature_names();
  if (raw_features.empty()) throw FitError("model file lacks preprocess input columns");

  cardio::Dataset ds;
  cardio::Matrix x;
  try {
    ds = load_dataset(args.in, raw_features, "");
    x = cardio::apply_preprocess(mf.preprocess, ds);
  } catch (const SchemaError& e) {
    throw FitError(e.what());
  }

  cardio::ShapMatrix shap;
  if (mf.forest) {
    shap = cardio::ensemble_shap(*mf.forest, x, args.threads);
  } else if (mf.boosted) {
    shap = cardio::ensemble_shap(*mf.boosted, x, args.threads);
  } else {
    throw FitError("model file has no trees");
  }

  {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + args.out);
    out << "# space=" << shap.space << " base_value=" << cardio::format_double(shap.base_value)
        << '\n';
    out << "sample_id,feature,shap_value,feature_value\n";
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const long long sample_id =
          ds.study_ids.empty() ? static_cast<long long>(i) : ds.study_ids[i];
      for (std::size_t j = 0; j < x.cols(); ++j) {
        out << sample_id << ',' << cardio::csv_escape(mf.feature_names[j]) << ','
            << cardio::format_double(shap.values(i, j)) << ','
            << cardio::format_double(x(i, j)) << '\n';
      }
    }
  }
  if (!args.summary.empty()) {
    const cardio::ImportanceRanking ranking = cardio::shap_summary(shap, mf.feature_names);
    std::ofstream out(args.summary, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + args.summary);
    out << "# space=" << shap.space << " base_value=" << cardio::format_double(shap.base_value)
        << '\n';
    out << "feature,mean_abs_shap,rank\n";
    for (std::size_t r = 0; r < ranking.entries.size(); ++r) {
      out << cardio::csv_escape(ranking.entries[r].first) << ','
          << cardio::format_double(ranking.entries[r].second) << ',' << (r + 1) << '\n';
    }
  }
  std::cerr << "explain: " << x.rows() << " rows, base=" << shap.base_value << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cardioforest: tree-ensemble toolkit for tabular waveform measurements"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a calibrated synthetic dataset");
  synth_cmd->add_option("--n", synth.n, "Row count")->capture_default_str();
  synth_cmd->add_option("--prevalence", synth.prevalence, "Positive fraction")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output CSV")->required();

  PrepArgs prep;
  auto* prep_cmd = app.add_subcommand("prep", "Clean, impute, and encode a measurements CSV");
  prep_cmd->add_option("--in", prep.in)->required();
  prep_cmd->add_option("--out", prep.out)->required();
  prep_cmd->add_option("--report", prep.report, "Report JSON path (default <out>.report.json)");
  prep_cmd->add_option("--keys", prep.keys, "Deduplication key columns")->capture_default_str();
  prep_cmd->add_option("--time-columns", prep.time_columns, "Timestamp columns to normalize");
  prep_cmd->add_flag("--no-dedup", prep.no_dedup);
  prep_cmd->add_flag("--no-repair", prep.no_repair);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write model JSON");
  train_cmd->add_option("--in", train.in)->required();
  train_cmd->add_option("--model", train.model)
      ->required()
      ->check(CLI::IsMember({"cardioforest", "xgb", "lgbm", "gbm"}));
  train_cmd->add_option("--out", train.out)->required();
  train_cmd->add_option("--label-column", train.label_column)->capture_default_str();
  train_cmd->add_option("--features", train.features, "Comma-separated feature columns");
  train_cmd->add_option("--config", train.config, "JSON config file");
  train_cmd->add_option("--seed", train.seed, "Training seed (default 42)");
  train_cmd->add_option("--threads", train.threads, "-1 = all cores")->capture_default_str();
  train_cmd->add_flag("--derived", train.derived, "Append derived interval features");
  train_cmd->add_flag("--prune", train.prune, "Correlation-prune features");
  train_cmd->add_option("--prune-threshold", train.prune_threshold)->capture_default_str();
  train_cmd->add_option("--pca", train.pca, "Project onto this many components (0 = off)");
  train.hyper.add_options(train_cmd);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict with a trained model");
  predict_cmd->add_option("--model", predict.model)->required();
  predict_cmd->add_option("--in", predict.in)->required();
  predict_cmd->add_option("--out", predict.out)->required();
  predict_cmd->add_option("--threads", predict.threads)->capture_default_str();

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv", "Stratified cross-validation report");
  cv_cmd->add_option("--in", cv.in)->required();
  cv_cmd->add_option("--models", cv.models)->capture_default_str();
  cv_cmd->add_option("--label-column", cv.label_column)->capture_default_str();
  cv_cmd->add_option("--features", cv.features);
  cv_cmd->add_option("--config", cv.config, "JSON config file (per-model sections)");
  cv_cmd->add_option("--out-csv", cv.out_csv, "Fold metrics CSV (default stdout)");
  cv_cmd->add_option("--out-json", cv.out_json, "Aggregate JSON");
  cv_cmd->add_option("--k", cv.k)->capture_default_str();
  cv_cmd->add_option("--seed", cv.seed)->capture_default_str();
  cv_cmd->add_option("--threads", cv.threads)->capture_default_str();

  ExplainArgs explain;
  auto* explain_cmd = app.add_subcommand("explain", "Per-feature attributions for a model");
  explain_cmd->add_option("--model", explain.model)->required();
  explain_cmd->add_option("--in", explain.in)->required();
  explain_cmd->add_option("--out", explain.out)->required();
  explain_cmd->add_option("--summary", explain.summary, "Ranked importance CSV");
  explain_cmd->add_option("--threads", explain.threads)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (prep_cmd->parsed()) return cmd_prep(prep);
    if (train_cmd->parsed()) return cmd_train(train);
    if (predict_cmd->parsed()) return cmd_predict(predict);
    if (cv_cmd->parsed()) return cmd_cv(cv);
    if (explain_cmd->parsed()) return cmd_explain(explain);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  }
  return kExitUsage;
}
