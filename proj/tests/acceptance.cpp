// Acceptance suite. Each criterion prints one PASS/FAIL line; the binary
// exits non-zero when any criterion fails. argv[1] must point at the CLI.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cardioforest/dataio.hpp"
#include "cardioforest/ensemble.hpp"
#include "cardioforest/eval.hpp"
#include "cardioforest/explain.hpp"
#include "cardioforest/features.hpp"
#include "cardioforest/rng.hpp"
#include "cardioforest/synth.hpp"
#include "cardioforest/tree.hpp"
#include "oracles.hpp"

using namespace cardio;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << label;
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << std::endl;
  if (!pass) ++failures;
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

void criterion_1_treeshap_exactness() {
  const auto start = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;

  double worst = 0.0;
  int tree_count = 0;
  for (std::uint64_t seed = 1000; tree_count < 100; ++seed) {
    const std::size_t d = 2 + (tree_count % 9);  // 2..10 features
    Tree t;
    if (tree_count % 2 == 0) {
      t = oracles::random_classification_tree(seed, 60, d, 4);
    } else {
      t = oracles::random_regression_tree(seed, 60, d, 4).first;
    }
    if (t.n_leaves < 2) continue;
    ++tree_count;
    Rng rng(seed ^ 0xF00D);
    for (int probe = 0; probe < 3; ++probe) {
      std::vector<double> x(d);
      for (auto& v : x) v = rng.next_double();
      const auto [phi, base] = tree_shap(t, x, d);
      (void)base;
      const std::vector<double> expected = oracles::brute_shapley(t, x, d);
      for (std::size_t j = 0; j < d; ++j) {
        worst = std::max(worst, std::abs(phi[j] - expected[j]));
      }
    }
  }
  if (worst > 1e-9) {
    pass = false;
    detail = "oracle deviation " + std::to_string(worst);
  }

  // Local accuracy on 1000 rows for each of the four model types.
  SynthConfig c;
  c.n = 1000;
  c.seed = 42;
  const Dataset ds = generate_synthetic(c);
  const StandardizerState scaler = fit_standardize(ds.features);
  const Matrix x = apply_standardize(ds.features, scaler);

  double worst_local = 0.0;
  {
    ForestParams p;
    p.n_estimators = 50;
    const ForestModel m = fit_cardioforest(x, ds.labels, p);
    const ShapMatrix shap = ensemble_shap(m, x);
    const Prediction pred = predict_forest(m, x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double total = shap.base_value;
      for (std::size_t j = 0; j < x.cols(); ++j) total += shap.values(i, j);
      worst_local = std::max(worst_local, std::abs(total - pred.probabilities[i]));
    }
  }
  for (const BoostVariant variant : {BoostVariant::gbm, BoostVariant::xgb, BoostVariant::lgbm}) {
    const BoostedModel m = fit_boosted(x, ds.labels, BoostParams::defaults(variant));
    const ShapMatrix shap = ensemble_shap(m, x);
    const std::vector<double> margins = predict_boosted_margin(m, x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double total = shap.base_value;
      for (std::size_t j = 0; j < x.cols(); ++j) total += shap.values(i, j);
      worst_local = std::max(worst_local, std::abs(total - margins[i]));
    }
  }
  if (worst_local > 1e-9) {
    pass = false;
    detail += " local accuracy deviation " + std::to_string(worst_local);
  }

  const double secs = elapsed_seconds(start);
  if (secs >= 60.0) {
    pass = false;
    detail += " runtime " + std::to_string(secs) + "s";
  }
  report(1, "exact attributions match the exhaustive oracle and reconstruct outputs", pass,
         detail.empty() ? std::to_string(secs) + "s" : detail);
}

void criterion_2_ccp_optimality() {
  const auto start = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;

  int tested = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 2000; tested < 100; ++seed) {
    const Tree t = oracles::random_classification_tree(seed, 48, 3, 4);
    if (t.n_leaves > 15 || t.n_leaves < 2) continue;
    ++tested;
    Rng rng(seed ^ 0xCC);
    for (int k = 0; k < 20; ++k) {
      const double alpha = rng.next_double() * 0.25;
      const Tree pruned = prune_ccp(t, alpha);
      const double achieved = oracles::cost_complexity_of(pruned, alpha);
      const double best = oracles::min_cost_complexity(t, alpha);
      worst = std::max(worst, achieved - best);
    }
  }
  if (worst > 1e-12) {
    pass = false;
    detail = "excess cost " + std::to_string(worst);
  }
  const double secs = elapsed_seconds(start);
  if (secs >= 60.0) {
    pass = false;
    detail += " runtime " + std::to_string(secs) + "s";
  }
  report(2, "weakest-link pruning attains the exhaustive cost-complexity minimum", pass,
         detail.empty() ? std::to_string(secs) + "s" : detail);
}

void criterion_3_auc_oracle() {
  bool pass = true;
  std::string detail;
  if (std::abs(roc_auc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) - 0.75) > 1e-15) {
    pass = false;
    detail = "hand case failed";
  }
  Rng rng(3000);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + rng.next_below(990);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::floor(rng.next_double() * 25.0) / 25.0;
      labels[i] = rng.next_double() < 0.35 ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    worst = std::max(worst,
                     std::abs(roc_auc(scores, labels) - oracles::pairwise_auc(scores, labels)));
  }
  if (worst > 1e-12) {
    pass = false;
    detail += " pairwise deviation " + std::to_string(worst);
  }
  report(3, "rank-based ROC-AUC equals the O(n^2) pairwise oracle", pass, detail);
}

void criterion_4_metric_identities() {
  bool pass = true;
  std::string detail;
  Rng rng(4000);
  for (int trial = 0; trial < 10000 && pass; ++trial) {
    ConfusionCounts c;
    c.tp = static_cast<long long>(rng.next_below(40));
    c.fp = static_cast<long long>(rng.next_below(40));
    c.fn = static_cast<long long>(rng.next_below(40));
    c.tn = static_cast<long long>(rng.next_below(40));
    if (c.total() == 0) continue;
    std::vector<int> y;
    std::vector<double> probs;
    for (long long i = 0; i < c.tp; ++i) { y.push_back(1); probs.push_back(0.8); }
    for (long long i = 0; i < c.fn; ++i) { y.push_back(1); probs.push_back(0.2); }
    for (long long i = 0; i < c.fp; ++i) { y.push_back(0); probs.push_back(0.8); }
    for (long long i = 0; i < c.tn; ++i) { y.push_back(0); probs.push_back(0.2); }
    const MetricsRow m = metrics_suite(c, probs, y);

    const double recall_pos = (c.tp + c.fn) > 0 ? double(c.tp) / double(c.tp + c.fn) : 0.0;
    const double recall_neg = (c.tn + c.fp) > 0 ? double(c.tn) / double(c.tn + c.fp) : 0.0;
    if (std::abs(m.balanced_accuracy - 0.5 * (recall_pos + recall_neg)) > 1e-12) {
      pass = false;
      detail = "balanced accuracy identity";
    }
    if (m.rmse < m.mae - 1e-12) {
      pass = false;
      detail = "rmse < mae";
    }
    const double f1 = (m.precision + m.recall) > 0.0
                          ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                          : 0.0;
    if (std::abs(m.f1 - f1) > 1e-12) {
      pass = false;
      detail = "f1 harmonic identity";
    }
  }
  report(4, "metric identities hold over 10000 random confusion counts", pass, detail);
}

void criterion_5_synthetic_calibration() {
  SynthConfig c;
  c.n = 100000;
  c.prevalence = 0.1546;
  c.seed = 42;
  const Dataset ds = generate_synthetic(c);
  std::size_t rr = 0, qrs = 0;
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    if (ds.feature_names[j] == "rr_interval") rr = j;
    if (ds.feature_names[j] == "qrs_duration") qrs = j;
  }
  double positives = 0.0, rr_sum = 0.0, qrs_sum = 0.0;
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    positives += ds.labels[i];
    rr_sum += ds.features(i, rr);
    qrs_sum += ds.features(i, qrs);
  }
  const double n = static_cast<double>(ds.n_rows());
  const double prevalence = positives / n;
  const double rr_mean = rr_sum / n;
  const double qrs_mean = qrs_sum / n;

  const bool pass = std::abs(prevalence - 0.1546) < 0.005 &&
                    std::abs(rr_mean - 865.60) / 865.60 < 0.02 &&
                    std::abs(qrs_mean - 108.51) / 108.51 < 0.02;
  std::ostringstream detail;
  detail << "prevalence " << prevalence << ", rr " << rr_mean << ", qrs " << qrs_mean;
  report(5, "synthetic generator hits prevalence 0.1546 +-0.005 and means +-2%", pass,
         detail.str());
}

void criterion_6_wct_rule() {
  bool pass = true;
  std::string detail;
  for (const std::uint64_t seed : {1ULL, 42ULL, 77ULL}) {
    SynthConfig c;
    c.n = 5000;
    c.seed = seed;
    const Dataset ds = generate_synthetic(c);
    std::size_t qrs = 0;
    for (std::size_t j = 0; j < ds.n_cols(); ++j) {
      if (ds.feature_names[j] == "qrs_duration") qrs = j;
    }
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      if (ds.labels[i] != derive_wct_label(ds.features(i, qrs))) {
        pass = false;
        detail = "label mismatch at seed " + std::to_string(seed);
      }
    }
  }
  if (derive_wct_label(120.0) != 0 || derive_wct_label(119.999) != 0 ||
      derive_wct_label(120.001) != 1) {
    pass = false;
    detail += " strict threshold violated";
  }
  for (int i = 0; i <= 2400 && pass; ++i) {
    const double v = i * 0.1;
    if (derive_wct_label(v) != (v > 120.0 ? 1 : 0)) {
      pass = false;
      detail = "grid mismatch at " + std::to_string(v);
    }
  }
  report(6, "labels reproduce the strict >120 ms rule on every synthetic dataset", pass, detail);
}

struct FoldBalance {
  std::vector<double> cardioforest;
  std::vector<double> lightgbm;
};

FoldBalance parse_balanced_accuracy(const std::string& csv) {
  FoldBalance out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (fields.size() < 4) continue;
    const double value = std::stod(fields[3]);
    if (fields[0] == "CardioForest") out.cardioforest.push_back(value);
    if (fields[0] == "LightGBM") out.lightgbm.push_back(value);
  }
  return out;
}

void criterion_7_pipeline(const std::string& cli) {
  bool pass = true;
  std::string detail;
  const std::string dir = "/tmp/cardioforest_acceptance";
  if (std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) != 0) {
    report(7, "cross-validation pipeline", false, "workspace setup failed");
    return;
  }
  const std::string data = dir + "/synth10k.csv";
  if (std::system((cli + " synth --n 10000 --prevalence 0.1546 --seed 42 --out " + data +
                   " 2>/dev/null").c_str()) != 0) {
    report(7, "cross-validation pipeline", false, "synth failed");
    return;
  }

  const std::string base_cmd = cli + " cv --in " + data +
                               " --models cardioforest,xgb,lgbm,gbm --k 10 --seed 42";
  const auto start = std::chrono::steady_clock::now();
  if (std::system((base_cmd + " --out-csv " + dir + "/r1.csv --out-json " + dir +
                   "/r1.json 2>/dev/null").c_str()) != 0) {
    report(7, "cross-validation pipeline", false, "cv run failed");
    return;
  }
  const double secs = elapsed_seconds(start);
  if (secs >= 300.0) {
    pass = false;
    detail += "runtime " + std::to_string(secs) + "s; ";
  }

  const int rerun_rc =
      std::system((base_cmd + " --out-csv " + dir + "/r2.csv --out-json " + dir +
                   "/r2.json 2>/dev/null").c_str());
  const int t1_rc =
      std::system((base_cmd + " --threads 1 --out-csv " + dir + "/t1.csv 2>/dev/null").c_str());
  const int t4_rc =
      std::system((base_cmd + " --threads 4 --out-csv " + dir + "/t4.csv 2>/dev/null").c_str());
  if (rerun_rc != 0 || t1_rc != 0 || t4_rc != 0) {
    pass = false;
    detail += "repeat runs failed; ";
  }

  const std::string r1 = slurp(dir + "/r1.csv");
  if (r1 != slurp(dir + "/r2.csv")) {
    pass = false;
    detail += "rerun bytes differ; ";
  }
  if (slurp(dir + "/t1.csv") != slurp(dir + "/t4.csv") || r1 != slurp(dir + "/t1.csv")) {
    pass = false;
    detail += "thread counts change bytes; ";
  }
  if (slurp(dir + "/r1.json") != slurp(dir + "/r2.json")) {
    pass = false;
    detail += "json differs; ";
  }

  const FoldBalance balance = parse_balanced_accuracy(r1);
  if (balance.cardioforest.size() != 10 || balance.lightgbm.size() != 10) {
    pass = false;
    detail += "expected 10 folds per model; ";
  } else {
    int wins = 0;
    for (std::size_t f = 0; f < 10; ++f) {
      if (balance.cardioforest[f] > balance.lightgbm[f]) ++wins;
    }
    if (wins < 9) {
      pass = false;
      detail += "balanced-accuracy wins " + std::to_string(wins) + "/10; ";
    } else {
      detail += "wins " + std::to_string(wins) + "/10; ";
    }
  }

  // 8 metric columns x 10 rows per model.
  std::size_t lines = 0;
  for (const char ch : r1) lines += ch == '\n' ? 1 : 0;
  if (lines != 1 + 4 * 10) {
    pass = false;
    detail += "row count " + std::to_string(lines) + "; ";
  }
  detail += std::to_string(secs) + "s";
  report(7, "cv pipeline: shape, determinism, thread independence, model ordering", pass, detail);
}

void criterion_8_equivalence() {
  Rng rng(8000);
  Matrix x(50, 3);
  std::vector<int> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x(i, 0) = static_cast<double>(rng.next_below(4));
    x(i, 1) = static_cast<double>(rng.next_below(4));
    x(i, 2) = static_cast<double>(rng.next_below(4));
    y[i] = (x(i, 0) + x(i, 1) >= 4.0) ? 1 : 0;
  }
  bool has0 = false, has1 = false;
  for (const int v : y) (v == 1 ? has1 : has0) = true;
  if (!has0) y[0] = 0;
  if (!has1) y[0] = 1;

  BoostParams p = BoostParams::defaults(BoostVariant::lgbm);
  p.n_estimators = 4;
  p.max_depth = 2;
  p.learning_rate = 0.3;
  p.subsample = 1.0;
  p.colsample_bytree = 1.0;
  p.reg_alpha = 0.5;
  p.reg_lambda = 1.0;
  p.gamma = 0.0;
  p.min_child_samples = 1;
  p.top_rate = 0.2;
  p.other_rate = 0.8;  // a + b = 1: GOSS keeps every row at weight one
  p.max_bins = 255;    // per-value binning for this fixture
  p.seed = 99;
  const BoostedModel lgbm = fit_lgbm(x, y, p);

  BoostParams q = p;
  q.variant = BoostVariant::xgb;
  q.min_samples_leaf = 1;
  q.min_samples_split = 2;
  const BoostedModel xgb = fit_xgb(x, y, q);

  bool pass = lgbm.base_score == xgb.base_score && lgbm.trees.size() == xgb.trees.size();
  std::string detail;
  if (!pass) detail = "model shells differ";
  for (std::size_t t = 0; pass && t < lgbm.trees.size(); ++t) {
    if (lgbm.trees[t].nodes.size() != xgb.trees[t].nodes.size()) {
      pass = false;
      detail = "tree " + std::to_string(t) + " sizes differ";
      break;
    }
    for (std::size_t i = 0; i < lgbm.trees[t].nodes.size(); ++i) {
      const TreeNode& a = lgbm.trees[t].nodes[i];
      const TreeNode& b = xgb.trees[t].nodes[i];
      if (a.feature != b.feature || a.threshold != b.threshold || a.value != b.value ||
          a.cover != b.cover || a.n_samples != b.n_samples || a.left != b.left ||
          a.right != b.right) {
        pass = false;
        detail = "tree " + std::to_string(t) + " node " + std::to_string(i) + " differs";
        break;
      }
    }
  }
  report(8, "histogram+GOSS path with per-value bins reproduces the exact path tree-for-tree",
         pass, detail);
}

void criterion_9_oob() {
  bool pass = true;
  std::string detail;

  const std::size_t n = 10000;
  const std::vector<int> draws = bootstrap_sample(n, 42);
  std::vector<std::uint8_t> seen(n, 0);
  for (const int d : draws) seen[static_cast<std::size_t>(d)] = 1;
  std::size_t in_bag = 0;
  for (const std::uint8_t s : seen) in_bag += s;
  const double oob_fraction = 1.0 - static_cast<double>(in_bag) / static_cast<double>(n);
  if (std::abs(oob_fraction - 0.368) >= 0.01) {
    pass = false;
    detail = "oob fraction " + std::to_string(oob_fraction);
  }

  Rng rng(9000);
  Matrix x(120, 3);
  std::vector<int> y(120);
  for (std::size_t i = 0; i < 120; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.next_double();
    y[i] = x(i, 2) > 0.5 ? 1 : 0;
  }
  ForestParams p;
  p.n_estimators = 1;
  p.bootstrap = false;
  p.oob_score = false;
  p.tree.ccp_alpha = 0.0;
  const ForestModel m = fit_cardioforest(x, y, p);
  const Prediction pred = predict_forest(m, x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto proba = predict_tree(m.trees[0], x.row(i));
    if (pred.probabilities[i] != proba[1] ||
        pred.labels[i] != (proba[1] > proba[0] ? 1 : 0)) {
      pass = false;
      detail += " single-tree reduction broken";
      break;
    }
  }
  report(9, "bootstrap OOB fraction is 1/e within 0.01; one-tree forest is its tree", pass,
         detail.empty() ? "oob " + std::to_string(oob_fraction) : detail);
}

void criterion_10_stability() {
  // Frozen per-fold accuracy columns used as a stability fixture.
  const std::vector<double> lgbm = {0.8372, 0.8504, 0.8334, 0.8522, 0.8390,
                                    0.8464, 0.8420, 0.8390, 0.8524, 0.8408};
  const std::vector<double> xgb = {0.8668, 0.8910, 0.8838, 0.8966, 0.8814,
                                   0.8872, 0.8862, 0.8720, 0.8916, 0.8812};
  const std::vector<double> gbm = {0.9300, 0.9520, 0.8802, 0.9486, 0.8486,
                                   0.9514, 0.9568, 0.9450, 0.8862, 0.9532};
  const StabilityRow lgbm_row = stability_stats(lgbm);
  const StabilityRow xgb_row = stability_stats(xgb);
  const StabilityRow gbm_row = stability_stats(gbm);

  bool pass = true;
  std::string detail;
  // Hand-derived sample-std coefficients of variation for those columns.
  if (std::abs(lgbm_row.cv_percent - 0.792711) > 0.01) {
    pass = false;
    detail += "lgbm cv " + std::to_string(lgbm_row.cv_percent) + "; ";
  }
  if (std::abs(xgb_row.cv_percent - 1.022254) > 0.01) {
    pass = false;
    detail += "xgb cv " + std::to_string(xgb_row.cv_percent) + "; ";
  }
  if (std::abs(gbm_row.cv_percent - 4.195928) > 0.01) {
    pass = false;
    detail += "gbm cv " + std::to_string(gbm_row.cv_percent) + "; ";
  }
  // Summary figures quoted alongside this fixture elsewhere (0.89 / 2.31 /
  // 1.71) disagree with direct recomputation; assert the discrepancy rather
  // than hide it.
  if (std::abs(lgbm_row.cv_percent - 0.89) < 0.05 ||
      std::abs(xgb_row.cv_percent - 2.31) < 0.05 ||
      std::abs(gbm_row.cv_percent - 1.71) < 0.05) {
    pass = false;
    detail += "expected discrepancy with quoted figures vanished; ";
  }
  std::ostringstream summary;
  summary << "cv% lgbm " << lgbm_row.cv_percent << ", xgb " << xgb_row.cv_percent << ", gbm "
          << gbm_row.cv_percent;
  report(10, "fold-table stability recomputation matches direct hand arithmetic", pass,
         detail.empty() ? summary.str() : detail);
}

void criterion_11_shap_ranking() {
  SynthConfig c;
  c.n = 2000;
  c.seed = 42;
  const Dataset ds = generate_synthetic(c);
  const FoldAssignment folds = stratified_kfold(ds.labels, 10, 42);

  int rank_one = 0;
  for (int fold = 0; fold < 10; ++fold) {
    std::vector<int> train_rows, test_rows;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      (folds.fold_of[i] == fold ? test_rows : train_rows).push_back(static_cast<int>(i));
    }
    Matrix x_train(train_rows.size(), ds.n_cols());
    Matrix x_test(test_rows.size(), ds.n_cols());
    std::vector<int> y_train(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      for (std::size_t j = 0; j < ds.n_cols(); ++j) {
        x_train(i, j) = ds.features(static_cast<std::size_t>(train_rows[i]), j);
      }
      y_train[i] = ds.labels[static_cast<std::size_t>(train_rows[i])];
    }
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      for (std::size_t j = 0; j < ds.n_cols(); ++j) {
        x_test(i, j) = ds.features(static_cast<std::size_t>(test_rows[i]), j);
      }
    }
    const StandardizerState scaler = fit_standardize(x_train);
    x_train = apply_standardize(x_train, scaler);
    x_test = apply_standardize(x_test, scaler);

    ForestParams p;
    p.seed = seed_mix(seed_mix(42, kModelSeedTag), static_cast<std::uint64_t>(fold));
    const ForestModel m = fit_cardioforest(x_train, y_train, p);
    const ShapMatrix shap = ensemble_shap(m, x_test);
    const ImportanceRanking ranking = shap_summary(shap, ds.feature_names);
    if (!ranking.entries.empty() && ranking.entries[0].first == "qrs_duration") ++rank_one;
  }
  const bool pass = rank_one >= 9;
  report(11, "duration column ranks first by mean |attribution| in >=9 of 10 folds", pass,
         std::to_string(rank_one) + "/10 folds");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];

  criterion_1_treeshap_exactness();
  criterion_2_ccp_optimality();
  criterion_3_auc_oracle();
  criterion_4_metric_identities();
  criterion_5_synthetic_calibration();
  criterion_6_wct_rule();
  criterion_7_pipeline(cli);
  criterion_8_equivalence();
  criterion_9_oob();
  criterion_10_stability();
  criterion_11_shap_ranking();

  if (failures == 0) {
    std::cout << "all criteria passed" << std::endl;
    return 0;
  }
  std::cout << failures << " criteria failed" << std::endl;
  return 1;
}
