#include "cardioforest/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cardioforest/errors.hpp"
#include "cardioforest/parallel.hpp"
#include "cardioforest/rng.hpp"

namespace cardio {

std::string variant_name(BoostVariant v) {
  switch (v) {
    case BoostVariant::gbm: return "gbm";
    case BoostVariant::xgb: return "xgb";
    case BoostVariant::lgbm: return "lgbm";
  }
  return "xgb";
}

BoostVariant variant_from_name(const std::string& name) {
  if (name == "gbm") return BoostVariant::gbm;
  if (name == "xgb") return BoostVariant::xgb;
  if (name == "lgbm") return BoostVariant::lgbm;
  throw ConfigError("unknown boosting variant: " + name);
}

BoostParams BoostParams::defaults(BoostVariant v) {
  BoostParams p;
  p.variant = v;
  switch (v) {
    case BoostVariant::xgb:
      p.n_estimators = 10;
      p.max_depth = 2;
      p.learning_rate = 0.5;
      p.subsample = 0.4;
      p.colsample_bytree = 0.2;
      p.gamma = 3.0;
      p.reg_alpha = 2.0;
      p.reg_lambda = 2.0;
      break;
    case BoostVariant::lgbm:
      p.n_estimators = 5;
      p.max_depth = 1;
      p.learning_rate = 0.8;
      p.subsample = 0.3;
      p.colsample_bytree = 0.1;
      p.reg_alpha = 3.0;
      p.reg_lambda = 3.0;
      p.min_child_samples = 50;
      break;
    case BoostVariant::gbm:
      p.n_estimators = 3;
      p.max_depth = 2;
      p.learning_rate = 0.4;
      p.subsample = 0.5;
      p.min_samples_split = 9;
      p.min_samples_leaf = 10;
      p.max_features = 0.3;
      p.validation_fraction = 0.1;
      p.n_iter_no_change = 2;
      break;
  }
  return p;
}

void BoostParams::validate() const {
  if (n_estimators < 0) throw ConfigError("n_estimators must be >= 0");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("subsample must lie in (0, 1]");
  if (!(colsample_bytree > 0.0 && colsample_bytree <= 1.0)) {
    throw ConfigError("colsample_bytree must lie in (0, 1]");
  }
  if (max_bins < 2 || max_bins > 255) throw ConfigError("max_bins must lie in [2, 255]");
  if (variant == BoostVariant::lgbm) {
    if (top_rate < 0.0 || other_rate < 0.0 || top_rate + other_rate > 1.0 + 1e-12) {
      throw ConfigError("GOSS rates must satisfy a >= 0, b >= 0, a + b <= 1");
    }
  }
}

BinnedMatrix build_histograms(const Matrix& x, int max_bins) {
  if (max_bins < 2 || max_bins > 255) throw ConfigError("build_histograms: max_bins in [2, 255]");
  BinnedMatrix bm;
  bm.n_rows = x.rows();
  bm.n_cols = x.cols();
  bm.bin_indices.assign(bm.n_rows * bm.n_cols, 0);
  bm.bin_upper_bounds.resize(bm.n_cols);

  std::vector<double> distinct;
  for (std::size_t f = 0; f < bm.n_cols; ++f) {
    distinct.clear();
    distinct.reserve(bm.n_rows);
    for (std::size_t i = 0; i < bm.n_rows; ++i) distinct.push_back(x(i, f));
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    auto& edges = bm.bin_upper_bounds[f];
    const std::size_t m = distinct.size();
    if (m <= static_cast<std::size_t>(max_bins)) {
      edges.reserve(m > 0 ? m - 1 : 0);
      for (std::size_t i = 0; i + 1 < m; ++i) {
        edges.push_back(0.5 * (distinct[i] + distinct[i + 1]));
      }
    } else {
      const auto bins = static_cast<std::size_t>(max_bins);
      edges.reserve(bins - 1);
      for (std::size_t j = 1; j < bins; ++j) {
        const std::size_t idx = j * m / bins;
        edges.push_back(0.5 * (distinct[idx - 1] + distinct[idx]));
      }
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }

    for (std::size_t i = 0; i < bm.n_rows; ++i) {
      const double v = x(i, f);
      const auto it = std::lower_bound(edges.begin(), edges.end(), v);
      bm.bin_indices[i * bm.n_cols + f] = static_cast<std::uint8_t>(it - edges.begin());
    }
  }
  return bm;
}

GossSample goss_sample(const std::vector<double>& gradients, double top_rate, double other_rate,
                       std::uint64_t seed) {
  if (top_rate < 0.0 || other_rate < 0.0 || top_rate + other_rate > 1.0 + 1e-12) {
    throw ConfigError("goss_sample: need a >= 0, b >= 0, a + b <= 1");
  }
  if (other_rate == 0.0 && top_rate < 1.0) {
    throw ConfigError("goss_sample: b = 0 with a < 1 leaves the amplification undefined");
  }
  const std::size_t n = gradients.size();
  const auto top_n =
      std::min(n, static_cast<std::size_t>(std::ceil(top_rate * static_cast<double>(n))));

  std::vector<int> by_magnitude(n);
  std::iota(by_magnitude.begin(), by_magnitude.end(), 0);
  std::sort(by_magnitude.begin(), by_magnitude.end(), [&](int a, int b) {
    const double ga = std::abs(gradients[static_cast<std::size_t>(a)]);
    const double gb = std::abs(gradients[static_cast<std::size_t>(b)]);
    if (ga != gb) return ga > gb;
    return a < b;
  });

  std::vector<int> rest(by_magnitude.begin() + static_cast<std::ptrdiff_t>(top_n),
                        by_magnitude.end());
  const auto want =
      static_cast<std::size_t>(std::ceil(other_rate * static_cast<double>(n)));
  const std::size_t take = std::min(rest.size(), want);
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(rest.size() - i));
    std::swap(rest[i], rest[j]);
  }

  const double amplification = top_n == n ? 1.0 : (1.0 - top_rate) / other_rate;
  std::vector<std::pair<int, double>> selected;
  selected.reserve(top_n + take);
  for (std::size_t i = 0; i < top_n; ++i) {
    selected.emplace_back(by_magnitude[i], 1.0);
  }
  for (std::size_t i = 0; i < take; ++i) {
    selected.emplace_back(rest[i], amplification);
  }
  std::sort(selected.begin(), selected.end());

  GossSample out;
  out.indices.reserve(selected.size());
  out.weights.reserve(selected.size());
  for (const auto& [idx, w] : selected) {
    out.indices.push_back(idx);
    out.weights.push_back(w);
  }
  return out;
}

std::vector<int> bootstrap_sample(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValueError("bootstrap_sample: n must be >= 1");
  Rng rng(seed);
  std::vector<int> draws(n);
  for (std::size_t i = 0; i < n; ++i) draws[i] = static_cast<int>(rng.next_below(n));
  return draws;
}

std::array<double, 2> balanced_class_weights(const std::vector<int>& y) {
  long long n0 = 0, n1 = 0;
  for (const int v : y) (v == 0 ? n0 : n1) += 1;
  if (n0 == 0 || n1 == 0) {
    throw FitError("balanced_class_weights: both classes must be present");
  }
  const double n = static_cast<double>(y.size());
  return {n / (2.0 * static_cast<double>(n0)), n / (2.0 * static_cast<double>(n1))};
}

namespace {

void require_binary(const std::vector<int>& y) {
  bool has0 = false, has1 = false;
  for (const int v : y) {
    if (v == 0) has0 = true;
    else if (v == 1) has1 = true;
    else throw ValueError("labels must be 0 or 1");
  }
  if (!has0 || !has1) throw FitError("training labels contain a single class");
}

int tree_vote(const Tree& t, std::span<const double> x) {
  const TreeNode& leaf = t.node(tree_leaf_for(t, x));
  // Argmax of leaf class weights; ties to class 0.
  return leaf.class_weights[1] > leaf.class_weights[0] ? 1 : 0;
}

}  // namespace

ForestModel fit_cardioforest(const Matrix& x, const std::vector<int>& y, const ForestParams& p,
                             int threads) {
  if (x.rows() == 0) throw FitError("fit_cardioforest: empty data");
  if (y.size() != x.rows()) throw ValueError("fit_cardioforest: labels misaligned");
  if (p.n_estimators < 1) throw ConfigError("fit_cardioforest: n_estimators must be >= 1");
  require_binary(y);

  ForestModel model;
  model.params = p;
  model.class_weights = p.balanced_class_weight ? balanced_class_weights(y)
                                                : std::array<double, 2>{1.0, 1.0};

  const std::size_t n = x.rows();
  std::vector<double> row_weight(n);
  for (std::size_t i = 0; i < n; ++i) row_weight[i] = model.class_weights[y[i] == 0 ? 0 : 1];

  const ColumnOrder order = build_column_order(x);
  const auto t_count = static_cast<std::size_t>(p.n_estimators);
  model.trees.resize(t_count);
  std::vector<std::vector<int>> multiplicities(t_count);

  parallel_for(t_count, threads, [&](std::size_t t) {
    TreeParams tp = p.tree;
    tp.seed = seed_mix(p.seed, static_cast<std::uint64_t>(t));
    std::vector<int> mult(n, 1);
    if (p.bootstrap) {
      std::fill(mult.begin(), mult.end(), 0);
      for (const int r : bootstrap_sample(n, seed_mix(tp.seed, kBootstrapTag))) {
        mult[static_cast<std::size_t>(r)] += 1;
      }
    }
    Tree tree = fit_classification_tree(x, y, row_weight, mult, order, tp);
    model.trees[t] = prune_ccp(tree, tp.ccp_alpha);
    multiplicities[t] = std::move(mult);
  });

  if (p.bootstrap && p.oob_score) {
    std::vector<std::array<long long, 2>> votes(n, {0, 0});
    for (std::size_t t = 0; t < t_count; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        if (multiplicities[t][i] == 0) {
          votes[i][static_cast<std::size_t>(tree_vote(model.trees[t], x.row(i)))] += 1;
        }
      }
    }
    long long covered = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long long total = votes[i][0] + votes[i][1];
      if (total == 0) continue;  // never out of bag
      ++covered;
      const int label = votes[i][1] > votes[i][0] ? 1 : 0;
      if (label == y[i]) ++correct;
    }
    if (covered > 0) {
      model.oob_score = static_cast<double>(correct) / static_cast<double>(covered);
    }
  }
  return model;
}

Prediction predict_forest(const ForestModel& m, const Matrix& x, int threads) {
  if (!m.feature_names.empty() && x.cols() != m.feature_names.size()) {
    throw SchemaError("predict_forest: feature count mismatch");
  }
  Prediction out;
  out.labels.resize(x.rows());
  out.probabilities.resize(x.rows());
  parallel_for(x.rows(), threads, [&](std::size_t i) {
    long long votes1 = 0;
    double prob_sum = 0.0;
    for (const Tree& t : m.trees) {
      const auto proba = predict_tree(t, x.row(i));
      prob_sum += proba[1];
      if (proba[1] > proba[0]) ++votes1;
    }
    const auto total = static_cast<long long>(m.trees.size());
    out.labels[i] = votes1 > total - votes1 ? 1 : 0;
    out.probabilities[i] = m.trees.empty() ? 0.0 : prob_sum / static_cast<double>(total);
  });
  return out;
}

double sigmoid(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

double mean_binomial_deviance(const std::vector<double>& margins, const std::vector<int>& y,
                              const std::vector<int>& rows) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (const int r : rows) {
    const auto ri = static_cast<std::size_t>(r);
    const double f = margins[ri];
    // -2 [y f - log(1 + e^f)], written with log1p for stability.
    const double log_term = f > 0.0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f));
    total += 2.0 * (log_term - y[ri] * f);
  }
  return total / static_cast<double>(rows.size());
}

namespace {

// Deterministic fraction-of-n without replacement: seeded partial shuffle,
// ascending result.
std::vector<int> sample_fraction(std::size_t n, double fraction, std::uint64_t seed) {
  const auto want = static_cast<std::size_t>(
      std::clamp<double>(std::ceil(fraction * static_cast<double>(n)), 1.0,
                         static_cast<double>(n)));
  if (want >= n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  Rng rng(seed);
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < want; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(want);
  std::sort(pool.begin(), pool.end());
  return pool;
}

double base_log_odds(const std::vector<int>& y, const std::vector<int>& rows) {
  long long pos = 0;
  for (const int r : rows) pos += y[static_cast<std::size_t>(r)];
  const double p = static_cast<double>(pos) / static_cast<double>(rows.size());
  if (p <= 0.0 || p >= 1.0) throw FitError("base score undefined for single-class labels");
  return std::log(p / (1.0 - p));
}

std::vector<int> sampled_columns(std::size_t d, double colsample, std::uint64_t seed) {
  const int k = std::min(static_cast<int>(d),
                         std::max(1, static_cast<int>(std::ceil(
                                         colsample * static_cast<double>(d)))));
  if (static_cast<std::size_t>(k) == d) {
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  Rng rng(seed);
  return rng.sample_without_replacement(static_cast<int>(d), k);
}

// Histogram-based regression tree with the same gain/leaf machinery as the
// exact fitter. Thresholds are bin upper edges. min_samples_leaf counts raw
// selected rows per side.
class HistogramTreeBuilder {
 public:
  HistogramTreeBuilder(const Matrix& x, const BinnedMatrix& bins, const GradHess& gh,
                       const GossSample& sample, const std::vector<int>& pool,
                       const RegressionTreeParams& p)
      : x_(x), bins_(bins), gh_(gh), sample_(sample), pool_(pool), p_(p) {}

  Tree build() {
    if (sample_.indices.empty()) throw FitError("histogram tree: empty node");
    Tree tree;
    tree.kind = TreeKind::regression;

    tree.nodes.emplace_back();
    struct Work {
      int id;
      std::vector<int> rows;  // positions into sample_.indices? raw row ids
      std::vector<double> w;
      int depth;
    };
    std::vector<Work> stack;
    {
      Work root;
      root.id = 0;
      root.rows = sample_.indices;
      root.w = sample_.weights;
      root.depth = 0;
      stack.push_back(std::move(root));
    }
    while (!stack.empty()) {
      Work work = std::move(stack.back());
      stack.pop_back();
      process(tree, work, stack);
    }
    tree.refresh_stats();
    return tree;
  }

 private:
  template <typename Work, typename Stack>
  void process(Tree& tree, Work& work, Stack& stack) {
    const auto& rows = work.rows;
    const auto& weights = work.w;
    double g_sum = 0.0, h_sum = 0.0, cover = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto r = static_cast<std::size_t>(rows[k]);
      g_sum += weights[k] * gh_.g[r];
      h_sum += weights[k] * gh_.h[r];
      cover += weights[k];
    }
    {
      TreeNode& n = tree.node(work.id);
      n.value = regularized_leaf_weight(g_sum, h_sum, p_.reg_lambda, p_.reg_alpha);
      n.cover = cover;
      n.n_samples = static_cast<long long>(rows.size());
    }

    if (work.depth >= p_.max_depth ||
        static_cast<long long>(rows.size()) < p_.min_samples_split) {
      return;
    }

    std::optional<SplitCandidate> best;
    std::vector<double> hist_g, hist_h;
    std::vector<long long> hist_n;
    for (const int f : pool_) {
      const auto fi = static_cast<std::size_t>(f);
      const int nb = bins_.n_bins(fi);
      if (nb < 2) continue;
      hist_g.assign(static_cast<std::size_t>(nb), 0.0);
      hist_h.assign(static_cast<std::size_t>(nb), 0.0);
      hist_n.assign(static_cast<std::size_t>(nb), 0);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto r = static_cast<std::size_t>(rows[k]);
        const auto b = static_cast<std::size_t>(bins_.bin(r, fi));
        hist_g[b] += weights[k] * gh_.g[r];
        hist_h[b] += weights[k] * gh_.h[r];
        hist_n[b] += 1;
      }
      double gl = 0.0, hl = 0.0;
      long long left_raw = 0;
      for (int b = 0; b + 1 < nb; ++b) {
        const auto bi = static_cast<std::size_t>(b);
        gl += hist_g[bi];
        hl += hist_h[bi];
        left_raw += hist_n[bi];
        if (hist_n[bi] == 0) continue;  // split only after a populated bin
        if (left_raw < p_.min_samples_leaf) continue;
        const long long right_raw = static_cast<long long>(rows.size()) - left_raw;
        if (right_raw < p_.min_samples_leaf) break;
        const double gain = regularized_split_gain(gl, hl, g_sum - gl, h_sum - hl, g_sum, h_sum,
                                                   p_.reg_lambda, p_.gamma);
        if (gain > 0.0 && (!best || gain > best->gain)) {
          best = SplitCandidate{f, bins_.bin_upper_bounds[fi][bi], gain};
        }
      }
    }
    if (!best) return;

    const auto split_f = static_cast<std::size_t>(best->feature);
    std::vector<int> left_rows, right_rows;
    std::vector<double> left_w, right_w;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (x_(static_cast<std::size_t>(rows[k]), split_f) <= best->threshold) {
        left_rows.push_back(rows[k]);
        left_w.push_back(weights[k]);
      } else {
        right_rows.push_back(rows[k]);
        right_w.push_back(weights[k]);
      }
    }

    {
      TreeNode& parent = tree.node(work.id);
      parent.feature = best->feature;
      parent.threshold = best->threshold;
      parent.left = static_cast<int>(tree.nodes.size());
    }
    tree.nodes.emplace_back();
    {
      TreeNode& parent = tree.node(work.id);
      parent.right = static_cast<int>(tree.nodes.size());
    }
    tree.nodes.emplace_back();

    const int left_id = tree.node(work.id).left;
    const int right_id = tree.node(work.id).right;
    stack.push_back({right_id, std::move(right_rows), std::move(right_w), work.depth + 1});
    stack.push_back({left_id, std::move(left_rows), std::move(left_w), work.depth + 1});
  }

  const Matrix& x_;
  const BinnedMatrix& bins_;
  const GradHess& gh_;
  const GossSample& sample_;
  const std::vector<int>& pool_;
  RegressionTreeParams p_;
};

}  // namespace

BoostedModel fit_gbm(const Matrix& x, const std::vector<int>& y, const BoostParams& p) {
  p.validate();
  require_binary(y);
  const std::size_t n = x.rows();

  BoostedModel model;
  model.variant = BoostVariant::gbm;
  model.learning_rate = p.learning_rate;
  model.params = p;

  // Hold out the validation fraction before any fitting.
  std::vector<int> train_rows, val_rows;
  const bool early_stopping = p.validation_fraction > 0.0 && p.n_iter_no_change > 0;
  if (early_stopping) {
    std::vector<int> shuffled(n);
    std::iota(shuffled.begin(), shuffled.end(), 0);
    Rng rng(seed_mix(p.seed, kValSplitTag));
    rng.shuffle(shuffled);
    const auto val_n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(p.validation_fraction * static_cast<double>(n))));
    if (val_n >= n) throw ConfigError("validation_fraction leaves no training rows");
    val_rows.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(val_n));
    train_rows.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(val_n), shuffled.end());
    std::sort(val_rows.begin(), val_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
  } else {
    train_rows.resize(n);
    std::iota(train_rows.begin(), train_rows.end(), 0);
  }

  model.base_score = base_log_odds(y, train_rows);
  std::vector<double> margins(n, model.base_score);

  const ColumnOrder order = build_column_order(x);
  std::vector<int> pool(x.cols());
  std::iota(pool.begin(), pool.end(), 0);

  GradHess gh;
  gh.g.assign(n, 0.0);
  gh.h.assign(n, 1.0);
  std::vector<double> residual(n, 0.0);

  double best_val = std::numeric_limits<double>::infinity();
  int no_change_streak = 0;
  constexpr double kTol = 1e-7;

  for (int round = 0; round < p.n_estimators; ++round) {
    for (const int r : train_rows) {
      const auto ri = static_cast<std::size_t>(r);
      residual[ri] = y[ri] - sigmoid(margins[ri]);
      gh.g[ri] = -residual[ri];  // squared-error pull toward the residual
    }
    const std::uint64_t round_seed = seed_mix(p.seed, static_cast<std::uint64_t>(round));
    std::vector<int> in_bag = train_rows;
    if (p.subsample < 1.0) {
      const std::vector<int> picks = sample_fraction(
          train_rows.size(), p.subsample, seed_mix(round_seed, kRowSampleTag));
      in_bag.clear();
      in_bag.reserve(picks.size());
      for (const int i : picks) in_bag.push_back(train_rows[static_cast<std::size_t>(i)]);
    }

    RegressionTreeParams tp;
    tp.max_depth = p.max_depth;
    tp.min_samples_split = p.min_samples_split;
    tp.min_samples_leaf = p.min_samples_leaf;
    tp.max_features = p.max_features;
    tp.reg_lambda = 0.0;
    tp.reg_alpha = 0.0;
    tp.gamma = 0.0;
    tp.seed = round_seed;
    Tree tree = fit_regression_tree(x, gh, in_bag, {}, pool, order, tp);

    // One Newton step per leaf over the in-bag rows.
    std::vector<double> numer(tree.nodes.size(), 0.0);
    std::vector<double> denom(tree.nodes.size(), 0.0);
    for (const int r : in_bag) {
      const auto ri = static_cast<std::size_t>(r);
      const int leaf = tree_leaf_for(tree, x.row(ri));
      const double prob = sigmoid(margins[ri]);
      numer[static_cast<std::size_t>(leaf)] += residual[ri];
      denom[static_cast<std::size_t>(leaf)] += prob * (1.0 - prob);
    }
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      if (tree.nodes[i].is_leaf()) {
        tree.nodes[i].value = denom[i] < 1e-150 ? 0.0 : numer[i] / denom[i];
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      margins[i] += p.learning_rate * predict_tree_value(tree, x.row(i));
    }
    model.trees.push_back(std::move(tree));
    model.train_deviance.push_back(mean_binomial_deviance(margins, y, train_rows));

    if (early_stopping) {
      const double val = mean_binomial_deviance(margins, y, val_rows);
      if (best_val - val >= kTol) {
        best_val = val;
        no_change_streak = 0;
      } else {
        ++no_change_streak;
        if (no_change_streak >= p.n_iter_no_change) break;
      }
    }
  }
  model.stopped_at = static_cast<int>(model.trees.size());
  return model;
}

namespace {

BoostedModel fit_second_order(const Matrix& x, const std::vector<int>& y, const BoostParams& p,
                              bool histogram) {
  p.validate();
  require_binary(y);
  const std::size_t n = x.rows();

  BoostedModel model;
  model.variant = p.variant;
  model.learning_rate = p.learning_rate;
  model.params = p;

  std::vector<int> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  model.base_score = base_log_odds(y, all_rows);
  std::vector<double> margins(n, model.base_score);

  ColumnOrder order;
  BinnedMatrix bins;
  if (histogram) {
    bins = build_histograms(x, p.max_bins);
  } else {
    order = build_column_order(x);
  }

  GradHess gh;
  gh.g.assign(n, 0.0);
  gh.h.assign(n, 0.0);

  for (int round = 0; round < p.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = sigmoid(margins[i]);
      gh.g[i] = prob - y[i];
      gh.h[i] = prob * (1.0 - prob);
    }
    const std::uint64_t round_seed = seed_mix(p.seed, static_cast<std::uint64_t>(round));
    const std::vector<int> cols =
        sampled_columns(x.cols(), p.colsample_bytree, seed_mix(round_seed, kColSampleTag));

    RegressionTreeParams tp;
    tp.max_depth = p.max_depth;
    tp.min_samples_split = p.min_samples_split;
    tp.min_samples_leaf = histogram ? p.min_child_samples : p.min_samples_leaf;
    tp.max_features = 1.0;
    tp.reg_lambda = p.reg_lambda;
    tp.reg_alpha = p.reg_alpha;
    tp.gamma = p.gamma;
    tp.seed = round_seed;

    Tree tree;
    if (histogram) {
      const GossSample sample =
          goss_sample(gh.g, p.top_rate, p.other_rate, seed_mix(round_seed, kGossTag));
      HistogramTreeBuilder builder(x, bins, gh, sample, cols, tp);
      tree = builder.build();
    } else {
      const std::vector<int> in_bag =
          sample_fraction(n, p.subsample, seed_mix(round_seed, kRowSampleTag));
      tree = fit_regression_tree(x, gh, in_bag, {}, cols, order, tp);
    }

    for (std::size_t i = 0; i < n; ++i) {
      margins[i] += p.learning_rate * predict_tree_value(tree, x.row(i));
    }
    model.trees.push_back(std::move(tree));
    model.train_deviance.push_back(mean_binomial_deviance(margins, y, all_rows));
  }
  model.stopped_at = static_cast<int>(model.trees.size());
  return model;
}

}  // namespace

BoostedModel fit_xgb(const Matrix& x, const std::vector<int>& y, const BoostParams& p) {
  BoostParams q = p;
  q.variant = BoostVariant::xgb;
  return fit_second_order(x, y, q, /*histogram=*/false);
}

BoostedModel fit_lgbm(const Matrix& x, const std::vector<int>& y, const BoostParams& p) {
  BoostParams q = p;
  q.variant = BoostVariant::lgbm;
  return fit_second_order(x, y, q, /*histogram=*/true);
}

BoostedModel fit_boosted(const Matrix& x, const std::vector<int>& y, const BoostParams& p) {
  switch (p.variant) {
    case BoostVariant::gbm: return fit_gbm(x, y, p);
    case BoostVariant::xgb: return fit_xgb(x, y, p);
    case BoostVariant::lgbm: return fit_lgbm(x, y, p);
  }
  throw ConfigError("fit_boosted: unknown variant");
}

std::vector<double> predict_boosted_margin(const BoostedModel& m, const Matrix& x) {
  if (!m.feature_names.empty() && x.cols() != m.feature_names.size()) {
    throw SchemaError("predict_boosted: feature count mismatch");
  }
  std::vector<double> margins(x.rows(), m.base_score);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double sum = 0.0;
    for (const Tree& t : m.trees) sum += predict_tree_value(t, x.row(i));
    margins[i] += m.learning_rate * sum;
  }
  return margins;
}

Prediction predict_boosted(const BoostedModel& m, const Matrix& x) {
  const std::vector<double> margins = predict_boosted_margin(m, x);
  Prediction out;
  out.labels.resize(x.rows());
  out.probabilities.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out.probabilities[i] = sigmoid(margins[i]);
    out.labels[i] = out.probabilities[i] > 0.5 ? 1 : 0;
  }
  return out;
}

}  // namespace cardio
