#include "cardioforest/model_io.hpp"

#include <cmath>
#include <fstream>

#include "cardioforest/errors.hpp"

namespace cardio {

using nlohmann::json;

Matrix apply_preprocess(const Preprocess& pp, const Dataset& ds) {
  const std::size_t n = ds.n_rows();
  const std::size_t d = ds.n_cols();
  Matrix x = ds.features;

  if (pp.imputer) {
    if (pp.imputer->fitted_columns.size() != d) {
      throw SchemaError("apply_preprocess: imputer column count mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (ds.is_missing(i, j)) x(i, j) = pp.imputer->medians[j];
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (ds.is_missing(i, j)) {
          throw ValueError("apply_preprocess: missing value without an imputer state");
        }
      }
    }
  }

  if (pp.standardizer) x = apply_standardize(x, *pp.standardizer);

  if (!pp.kept_columns.empty() && pp.kept_columns.size() != d) {
    Matrix selected(n, pp.kept_columns.size());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < pp.kept_columns.size(); ++j) {
        selected(i, j) = x(i, pp.kept_columns[j]);
      }
    }
    x = std::move(selected);
  }

  if (pp.pca) x = apply_pca(x, *pp.pca);
  return x;
}

namespace {

json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const TreeNode& n = t.nodes[i];
    json jn;
    jn["id"] = i;
    if (n.is_leaf()) {
      jn["feature"] = nullptr;
      jn["threshold"] = nullptr;
      jn["left"] = nullptr;
      jn["right"] = nullptr;
    } else {
      jn["feature"] = n.feature;
      jn["threshold"] = n.threshold;
      jn["left"] = n.left;
      jn["right"] = n.right;
    }
    if (t.kind == TreeKind::classification) {
      jn["value"] = json::array({n.class_weights[0], n.class_weights[1]});
    } else {
      jn["value"] = n.value;
    }
    jn["cover"] = n.cover;
    jn["n_samples"] = n.n_samples;
    nodes.push_back(std::move(jn));
  }
  json jt;
  jt["nodes"] = std::move(nodes);
  jt["root"] = t.root;
  return jt;
}

Tree tree_from_json(const json& jt, TreeKind kind) {
  Tree t;
  t.kind = kind;
  t.root = jt.at("root").get<int>();
  const json& nodes = jt.at("nodes");
  t.nodes.resize(nodes.size());
  for (const json& jn : nodes) {
    const auto id = jn.at("id").get<std::size_t>();
    TreeNode& n = t.nodes.at(id);
    if (jn.at("feature").is_null()) {
      n.feature = -1;
      n.left = n.right = -1;
    } else {
      n.feature = jn.at("feature").get<int>();
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
    }
    if (kind == TreeKind::classification) {
      const json& value = jn.at("value");
      n.class_weights = {value.at(0).get<double>(), value.at(1).get<double>()};
      const double total = n.class_weights[0] + n.class_weights[1];
      if (total > 0.0) {
        const double p0 = n.class_weights[0] / total;
        const double p1 = n.class_weights[1] / total;
        n.impurity = 1.0 - (p0 * p0 + p1 * p1);
      }
    } else {
      n.value = jn.at("value").get<double>();
    }
    n.cover = jn.at("cover").get<double>();
    n.n_samples = jn.at("n_samples").get<long long>();
  }
  t.refresh_stats();
  return t;
}

json forest_params_to_json(const ForestParams& p) {
  json j;
  j["n_estimators"] = p.n_estimators;
  j["max_depth"] = p.tree.max_depth;
  j["min_samples_split"] = p.tree.min_samples_split;
  j["min_samples_leaf"] = p.tree.min_samples_leaf;
  j["max_features"] = p.tree.max_features;
  j["ccp_alpha"] = p.tree.ccp_alpha;
  j["class_weight"] = p.balanced_class_weight ? "balanced" : "none";
  j["bootstrap"] = p.bootstrap;
  j["oob_score"] = p.oob_score;
  j["random_state"] = p.seed;
  return j;
}

ForestParams forest_params_from_json(const json& j) {
  ForestParams p;
  p.n_estimators = j.at("n_estimators").get<int>();
  p.tree.max_depth = j.at("max_depth").get<int>();
  p.tree.min_samples_split = j.at("min_samples_split").get<int>();
  p.tree.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  p.tree.max_features = j.at("max_features").get<double>();
  p.tree.ccp_alpha = j.at("ccp_alpha").get<double>();
  p.balanced_class_weight = j.at("class_weight").get<std::string>() == "balanced";
  p.bootstrap = j.at("bootstrap").get<bool>();
  p.oob_score = j.at("oob_score").get<bool>();
  p.seed = j.at("random_state").get<std::uint64_t>();
  p.tree.seed = p.seed;
  return p;
}

json boost_params_to_json(const BoostParams& p) {
  json j;
  j["n_estimators"] = p.n_estimators;
  j["max_depth"] = p.max_depth;
  j["learning_rate"] = p.learning_rate;
  j["subsample"] = p.subsample;
  j["colsample_bytree"] = p.colsample_bytree;
  j["reg_alpha"] = p.reg_alpha;
  j["reg_lambda"] = p.reg_lambda;
  j["gamma"] = p.gamma;
  j["min_child_samples"] = p.min_child_samples;
  j["min_samples_split"] = p.min_samples_split;
  j["min_samples_leaf"] = p.min_samples_leaf;
  j["max_features"] = p.max_features;
  j["validation_fraction"] = p.validation_fraction;
  j["n_iter_no_change"] = p.n_iter_no_change;
  j["top_rate"] = p.top_rate;
  j["other_rate"] = p.other_rate;
  j["max_bins"] = p.max_bins;
  j["random_state"] = p.seed;
  return j;
}

BoostParams boost_params_from_json(const json& j, BoostVariant variant) {
  BoostParams p;
  p.variant = variant;
  p.n_estimators = j.at("n_estimators").get<int>();
  p.max_depth = j.at("max_depth").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.subsample = j.at("subsample").get<double>();
  p.colsample_bytree = j.at("colsample_bytree").get<double>();
  p.reg_alpha = j.at("reg_alpha").get<double>();
  p.reg_lambda = j.at("reg_lambda").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.min_child_samples = j.at("min_child_samples").get<int>();
  p.min_samples_split = j.at("min_samples_split").get<int>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  p.max_features = j.at("max_features").get<double>();
  p.validation_fraction = j.at("validation_fraction").get<double>();
  p.n_iter_no_change = j.at("n_iter_no_change").get<int>();
  p.top_rate = j.at("top_rate").get<double>();
  p.other_rate = j.at("other_rate").get<double>();
  p.max_bins = j.at("max_bins").get<int>();
  p.seed = j.at("random_state").get<std::uint64_t>();
  return p;
}

json preprocess_to_json(const Preprocess& pp) {
  json j;
  if (pp.imputer) {
    json imp;
    imp["columns"] = pp.imputer->fitted_columns;
    imp["medians"] = pp.imputer->medians;
    j["imputer"] = std::move(imp);
  }
  if (pp.standardizer) {
    json st;
    st["means"] = pp.standardizer->means;
    st["stds"] = pp.standardizer->stds;
    j["standardizer"] = std::move(st);
  }
  if (pp.pca) {
    json pc;
    pc["mean"] = pp.pca->mean;
    json comps = json::array();
    for (std::size_t r = 0; r < pp.pca->components.rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < pp.pca->components.cols(); ++c) {
        row.push_back(pp.pca->components(r, c));
      }
      comps.push_back(std::move(row));
    }
    pc["components"] = std::move(comps);
    pc["explained_variance_ratio"] = pp.pca->explained_variance_ratio;
    j["pca"] = std::move(pc);
  }
  j["kept_columns"] = pp.kept_columns;
  return j;
}

Preprocess preprocess_from_json(const json& j) {
  Preprocess pp;
  if (j.contains("imputer")) {
    ImputerState imp;
    imp.fitted_columns = j.at("imputer").at("columns").get<std::vector<std::string>>();
    imp.medians = j.at("imputer").at("medians").get<std::vector<double>>();
    pp.imputer = std::move(imp);
  }
  if (j.contains("standardizer")) {
    StandardizerState st;
    st.means = j.at("standardizer").at("means").get<std::vector<double>>();
    st.stds = j.at("standardizer").at("stds").get<std::vector<double>>();
    pp.standardizer = std::move(st);
  }
  if (j.contains("pca")) {
    PcaState pc;
    pc.mean = j.at("pca").at("mean").get<std::vector<double>>();
    const json& comps = j.at("pca").at("components");
    const std::size_t k = comps.size();
    const std::size_t d = k > 0 ? comps.at(0).size() : 0;
    pc.components = Matrix(k, d);
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        pc.components(r, c) = comps.at(r).at(c).get<double>();
      }
    }
    pc.explained_variance_ratio =
        j.at("pca").at("explained_variance_ratio").get<std::vector<double>>();
    pp.pca = std::move(pc);
  }
  pp.kept_columns = j.at("kept_columns").get<std::vector<std::size_t>>();
  return pp;
}

}  // namespace

json model_to_json(const ModelFile& mf) {
  json j;
  j["format_version"] = mf.format_version;
  j["model_type"] = mf.model_type;
  j["feature_names"] = mf.feature_names;
  j["preprocess"] = preprocess_to_json(mf.preprocess);

  json trees = json::array();
  if (mf.forest) {
    j["params"] = forest_params_to_json(mf.forest->params);
    j["class_weights"] = json::array({mf.forest->class_weights[0], mf.forest->class_weights[1]});
    if (mf.forest->oob_score) j["oob_score"] = *mf.forest->oob_score;
    for (const Tree& t : mf.forest->trees) trees.push_back(tree_to_json(t));
  } else if (mf.boosted) {
    j["params"] = boost_params_to_json(mf.boosted->params);
    j["base_score"] = mf.boosted->base_score;
    j["learning_rate"] = mf.boosted->learning_rate;
    j["stopped_at"] = mf.boosted->stopped_at;
    for (const Tree& t : mf.boosted->trees) trees.push_back(tree_to_json(t));
  } else {
    throw ValueError("model_to_json: empty model file");
  }
  j["trees"] = std::move(trees);
  return j;
}

ModelFile model_from_json(const json& j) {
  ModelFile mf;
  mf.format_version = j.at("format_version").get<int>();
  mf.model_type = j.at("model_type").get<std::string>();
  mf.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  mf.preprocess = preprocess_from_json(j.at("preprocess"));

  if (mf.model_type == "cardioforest") {
    ForestModel fm;
    fm.params = forest_params_from_json(j.at("params"));
    fm.class_weights = {j.at("class_weights").at(0).get<double>(),
                        j.at("class_weights").at(1).get<double>()};
    if (j.contains("oob_score")) fm.oob_score = j.at("oob_score").get<double>();
    for (const json& jt : j.at("trees")) {
      fm.trees.push_back(tree_from_json(jt, TreeKind::classification));
    }
    fm.feature_names = mf.feature_names;
    mf.forest = std::move(fm);
  } else {
    BoostedModel bm;
    bm.variant = variant_from_name(mf.model_type);
    bm.params = boost_params_from_json(j.at("params"), bm.variant);
    bm.base_score = j.at("base_score").get<double>();
    bm.learning_rate = j.at("learning_rate").get<double>();
    bm.stopped_at = j.at("stopped_at").get<int>();
    for (const json& jt : j.at("trees")) {
      bm.trees.push_back(tree_from_json(jt, TreeKind::regression));
    }
    bm.feature_names = mf.feature_names;
    mf.boosted = std::move(bm);
  }
  return mf;
}

void save_model_file(const ModelFile& mf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open model file for writing: " + path);
  out << model_to_json(mf).dump(2) << '\n';
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model JSON schema: ") + e.what());
  }
}

}  // namespace cardio
