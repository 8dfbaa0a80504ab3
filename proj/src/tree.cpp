#include "cardioforest/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cardioforest/errors.hpp"
#include "cardioforest/rng.hpp"

namespace cardio {

void Tree::refresh_stats() {
  n_leaves = 0;
  depth = 0;
  std::vector<std::pair<int, int>> stack{{root, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = node(id);
    if (n.is_leaf()) {
      ++n_leaves;
      depth = std::max(depth, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
}

ColumnOrder build_column_order(const Matrix& x) {
  ColumnOrder co;
  co.order.resize(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& ord = co.order[f];
    ord.resize(x.rows());
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      const double va = x(static_cast<std::size_t>(a), f);
      const double vb = x(static_cast<std::size_t>(b), f);
      if (va != vb) return va < vb;
      return a < b;
    });
  }
  return co;
}

double gini(std::span<const double> weighted_counts) {
  double total = 0.0;
  for (const double c : weighted_counts) {
    if (c < 0.0) throw ValueError("gini: negative class weight");
    total += c;
  }
  if (total <= 0.0) throw ValueError("gini: total weight must be positive");
  double sum_sq = 0.0;
  for (const double c : weighted_counts) {
    const double p = c / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

namespace {

double gini2(double w0, double w1) {
  const double total = w0 + w1;
  const double p0 = w0 / total;
  const double p1 = w1 / total;
  return 1.0 - (p0 * p0 + p1 * p1);
}

// Scans the given features for the best weighted-Gini split of a node whose
// rows are flagged in `marks`. Walks the global sorted order so cost is
// O(n_total) per feature regardless of node size. Equal gains keep the first
// candidate, and features ascend, so ties resolve to (lower feature index,
// lower threshold).
std::optional<SplitCandidate> scan_class_split(
    const Matrix& x, const std::vector<int>& y, const std::vector<double>& w,
    const std::vector<int>& mult, const ColumnOrder& order,
    const std::vector<std::uint8_t>& marks, const std::vector<int>& subset, long long raw,
    double w0, double w1, int min_samples_leaf) {
  const double parent_gini = gini2(w0, w1);
  const double total = w0 + w1;

  std::optional<SplitCandidate> best;
  for (const int f : subset) {
    double left0 = 0.0, left1 = 0.0;
    long long left_raw = 0;
    double prev_value = 0.0;
    bool have_prev = false;
    for (const int r : order.order[static_cast<std::size_t>(f)]) {
      const auto ri = static_cast<std::size_t>(r);
      if (!marks[ri]) continue;
      const double value = x(ri, static_cast<std::size_t>(f));
      if (have_prev && value > prev_value && left_raw >= min_samples_leaf &&
          raw - left_raw >= min_samples_leaf) {
        const double right0 = w0 - left0;
        const double right1 = w1 - left1;
        const double wl = left0 + left1;
        const double wr = right0 + right1;
        if (wl > 0.0 && wr > 0.0) {
          const double gain = parent_gini - (wl / total) * gini2(left0, left1) -
                              (wr / total) * gini2(right0, right1);
          if (gain > 0.0 && (!best || gain > best->gain)) {
            best = SplitCandidate{f, 0.5 * (prev_value + value), gain};
          }
        }
      }
      const double row_weight = w[ri] * mult[ri];
      if (y[ri] == 0) left0 += row_weight;
      else left1 += row_weight;
      left_raw += mult[ri];
      prev_value = value;
      have_prev = true;
    }
  }
  return best;
}

std::vector<int> iota_vector(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

class ClassificationTreeBuilder {
 public:
  ClassificationTreeBuilder(const Matrix& x, const std::vector<int>& y,
                            const std::vector<double>& w, const std::vector<int>& multiplicity,
                            const ColumnOrder& order, const TreeParams& p)
      : x_(x), y_(y), w_(w), mult_(multiplicity), order_(order), p_(p) {}

  Tree build() {
    Tree tree;
    tree.kind = TreeKind::classification;
    marks_.assign(x_.rows(), 0);

    std::vector<int> root_rows;
    for (std::size_t r = 0; r < x_.rows(); ++r) {
      if (mult_[r] > 0) root_rows.push_back(static_cast<int>(r));
    }
    if (root_rows.empty()) throw FitError("fit_classification_tree: empty data");

    tree.nodes.emplace_back();
    struct Work {
      int id;
      std::vector<int> rows;
      int depth;
    };
    std::vector<Work> stack;
    stack.push_back({0, std::move(root_rows), 0});

    while (!stack.empty()) {
      Work work = std::move(stack.back());
      stack.pop_back();
      process(tree, work.id, work.rows, work.depth, stack);
    }
    tree.refresh_stats();
    return tree;
  }

 private:
  template <typename Stack>
  void process(Tree& tree, int id, const std::vector<int>& rows, int depth, Stack& stack) {
    double w0 = 0.0, w1 = 0.0;
    long long raw = 0;
    for (const int r : rows) {
      const auto ri = static_cast<std::size_t>(r);
      const double row_weight = w_[ri] * mult_[ri];
      if (y_[ri] == 0) w0 += row_weight;
      else w1 += row_weight;
      raw += mult_[ri];
    }
    {
      TreeNode& n = tree.node(id);
      n.class_weights = {w0, w1};
      n.cover = w0 + w1;
      n.n_samples = raw;
      n.impurity = gini2(w0, w1);
    }

    const bool pure = w0 == 0.0 || w1 == 0.0;
    if (pure || depth >= p_.max_depth || raw < p_.min_samples_split) return;

    const int d = static_cast<int>(x_.cols());
    const int k = std::min(d, std::max(1, static_cast<int>(std::ceil(p_.max_features * d))));
    std::vector<int> subset;
    if (k == d) {
      subset = iota_vector(d);
    } else {
      Rng node_rng(seed_mix(p_.seed, static_cast<std::uint64_t>(id)));
      subset = node_rng.sample_without_replacement(d, k);
    }

    for (const int r : rows) marks_[static_cast<std::size_t>(r)] = 1;
    const auto split = scan_class_split(x_, y_, w_, mult_, order_, marks_, subset, raw, w0, w1,
                                        p_.min_samples_leaf);
    for (const int r : rows) marks_[static_cast<std::size_t>(r)] = 0;
    if (!split) return;

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    for (const int r : rows) {
      if (x_(static_cast<std::size_t>(r), static_cast<std::size_t>(split->feature)) <=
          split->threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }

    {
      TreeNode& parent = tree.node(id);
      parent.feature = split->feature;
      parent.threshold = split->threshold;
      parent.left = static_cast<int>(tree.nodes.size());
    }
    tree.nodes.emplace_back();
    {
      TreeNode& parent = tree.node(id);
      parent.right = static_cast<int>(tree.nodes.size());
    }
    tree.nodes.emplace_back();

    stack.push_back({tree.node(id).right, std::move(right_rows), depth + 1});
    stack.push_back({tree.node(id).left, std::move(left_rows), depth + 1});
  }

  const Matrix& x_;
  const std::vector<int>& y_;
  const std::vector<double>& w_;
  const std::vector<int>& mult_;
  const ColumnOrder& order_;
  TreeParams p_;
  std::vector<std::uint8_t> marks_;
};

}  // namespace

std::optional<SplitCandidate> best_split(const std::vector<int>& rows, const Matrix& x,
                                         const std::vector<int>& y,
                                         const std::vector<double>& w,
                                         const std::vector<int>& feature_subset,
                                         int min_samples_leaf) {
  if (rows.empty()) throw ValueError("best_split: empty row set");
  if (feature_subset.empty()) throw ValueError("best_split: empty feature subset");

  std::vector<int> mult(x.rows(), 0);
  std::vector<std::uint8_t> marks(x.rows(), 0);
  for (const int r : rows) {
    mult[static_cast<std::size_t>(r)] = 1;
    marks[static_cast<std::size_t>(r)] = 1;
  }
  const ColumnOrder order = build_column_order(x);

  double w0 = 0.0, w1 = 0.0;
  for (const int r : rows) {
    if (y[static_cast<std::size_t>(r)] == 0) w0 += w[static_cast<std::size_t>(r)];
    else w1 += w[static_cast<std::size_t>(r)];
  }
  if (w0 + w1 <= 0.0) throw ValueError("best_split: total weight must be positive");

  std::vector<int> subset = feature_subset;
  std::sort(subset.begin(), subset.end());
  return scan_class_split(x, y, w, mult, order, marks, subset,
                          static_cast<long long>(rows.size()), w0, w1, min_samples_leaf);
}

Tree fit_classification_tree(const Matrix& x, const std::vector<int>& y,
                             const std::vector<double>& w, const std::vector<int>& multiplicity,
                             const ColumnOrder& order, const TreeParams& p) {
  ClassificationTreeBuilder builder(x, y, w, multiplicity, order, p);
  return builder.build();
}

Tree fit_classification_tree(const Matrix& x, const std::vector<int>& y,
                             const std::vector<double>& w, const TreeParams& p) {
  if (x.rows() == 0) throw FitError("fit_classification_tree: empty data");
  const std::vector<int> mult(x.rows(), 1);
  const ColumnOrder order = build_column_order(x);
  return fit_classification_tree(x, y, w, mult, order, p);
}

namespace {

struct PruneStats {
  double subtree_risk = 0.0;  // cover-weighted misclassification of leaves
  int leaves = 0;
};

PruneStats prune_stats(const Tree& t, int id, double root_cover,
                       const std::vector<std::uint8_t>& collapsed) {
  const TreeNode& n = t.node(id);
  if (n.is_leaf() || collapsed[static_cast<std::size_t>(id)]) {
    const double misclassified = n.cover - std::max(n.class_weights[0], n.class_weights[1]);
    return {misclassified / root_cover, 1};
  }
  const PruneStats l = prune_stats(t, n.left, root_cover, collapsed);
  const PruneStats r = prune_stats(t, n.right, root_cover, collapsed);
  return {l.subtree_risk + r.subtree_risk, l.leaves + r.leaves};
}

void collect_internal_alive(const Tree& t, int id, const std::vector<std::uint8_t>& collapsed,
                            std::vector<int>& out) {
  const TreeNode& n = t.node(id);
  if (n.is_leaf() || collapsed[static_cast<std::size_t>(id)]) return;
  out.push_back(id);
  collect_internal_alive(t, n.left, collapsed, out);
  collect_internal_alive(t, n.right, collapsed, out);
}

Tree compact_pruned(const Tree& t, const std::vector<std::uint8_t>& collapsed) {
  Tree out;
  out.kind = t.kind;

  struct Item {
    int src;
    int dst_parent;
    bool is_left;
  };
  std::vector<Item> stack{{t.root, -1, false}};
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    const TreeNode& src = t.node(item.src);
    const int dst = static_cast<int>(out.nodes.size());
    out.nodes.push_back(src);
    if (item.dst_parent >= 0) {
      if (item.is_left) out.node(item.dst_parent).left = dst;
      else out.node(item.dst_parent).right = dst;
    }
    if (src.is_leaf() || collapsed[static_cast<std::size_t>(item.src)]) {
      TreeNode& copy = out.node(dst);
      copy.feature = -1;
      copy.threshold = 0.0;
      copy.left = -1;
      copy.right = -1;
    } else {
      // Right pushed first so the left subtree is numbered first.
      stack.push_back({src.right, dst, false});
      stack.push_back({src.left, dst, true});
    }
  }
  out.refresh_stats();
  return out;
}

}  // namespace

Tree prune_ccp(const Tree& t, double alpha) {
  if (alpha < 0.0) throw ValueError("prune_ccp: alpha must be non-negative");
  Tree out = t;
  out.refresh_stats();
  // With no complexity penalty pruning can only tie the unpruned risk, so the
  // tree is kept as-is.
  if (alpha == 0.0 || out.nodes.empty()) return out;

  const double root_cover = out.node(out.root).cover;
  if (root_cover <= 0.0) return out;

  std::vector<std::uint8_t> collapsed(out.nodes.size(), 0);
  while (true) {
    std::vector<int> internal;
    collect_internal_alive(out, out.root, collapsed, internal);
    if (internal.empty()) break;

    double min_g = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> g_of;
    g_of.reserve(internal.size());
    for (const int id : internal) {
      const TreeNode& n = out.node(id);
      const PruneStats stats = prune_stats(out, id, root_cover, collapsed);
      const double risk_as_leaf =
          (n.cover - std::max(n.class_weights[0], n.class_weights[1])) / root_cover;
      const double g = (risk_as_leaf - stats.subtree_risk) / (stats.leaves - 1);
      g_of.emplace_back(id, g);
      min_g = std::min(min_g, g);
    }
    if (min_g > alpha) break;
    for (const auto& [id, g] : g_of) {
      if (g == min_g) collapsed[static_cast<std::size_t>(id)] = 1;
    }
  }
  return compact_pruned(out, collapsed);
}

double regularized_leaf_weight(double g_sum, double h_sum, double reg_lambda, double reg_alpha) {
  const double denom = h_sum + reg_lambda;
  if (denom <= 0.0) return 0.0;
  const double magnitude = std::max(std::abs(g_sum) - reg_alpha, 0.0);
  if (magnitude == 0.0) return 0.0;
  return g_sum > 0.0 ? -magnitude / denom : magnitude / denom;
}

double regularized_split_gain(double gl, double hl, double gr, double hr, double g_sum,
                              double h_sum, double reg_lambda, double gamma) {
  const double left = gl * gl / (hl + reg_lambda);
  const double right = gr * gr / (hr + reg_lambda);
  const double parent = g_sum * g_sum / (h_sum + reg_lambda);
  return 0.5 * (left + right - parent) - gamma;
}

namespace {

class RegressionTreeBuilder {
 public:
  RegressionTreeBuilder(const Matrix& x, const GradHess& gh, const std::vector<int>& rows,
                        const std::vector<double>& weights, const std::vector<int>& pool,
                        const ColumnOrder& order, const RegressionTreeParams& p)
      : x_(x), gh_(gh), rows_(rows), weights_(weights), pool_(pool), order_(order), p_(p) {}

  Tree build() {
    if (rows_.empty()) throw FitError("fit_regression_tree: empty node");
    Tree tree;
    tree.kind = TreeKind::regression;
    marks_.assign(x_.rows(), 0);
    gw_.assign(x_.rows(), 0.0);
    hw_.assign(x_.rows(), 0.0);
    cw_.assign(x_.rows(), 0.0);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto r = static_cast<std::size_t>(rows_[k]);
      const double w = weights_.empty() ? 1.0 : weights_[k];
      gw_[r] = w * gh_.g[r];
      hw_[r] = w * gh_.h[r];
      cw_[r] = w;
    }

    tree.nodes.emplace_back();
    struct Work {
      int id;
      std::vector<int> rows;
      int depth;
    };
    std::vector<Work> stack;
    stack.push_back({0, rows_, 0});
    while (!stack.empty()) {
      Work work = std::move(stack.back());
      stack.pop_back();
      process(tree, work.id, work.rows, work.depth, stack);
    }
    tree.refresh_stats();
    return tree;
  }

 private:
  template <typename Stack>
  void process(Tree& tree, int id, const std::vector<int>& rows, int depth, Stack& stack) {
    double g_sum = 0.0, h_sum = 0.0, cover = 0.0;
    for (const int r : rows) {
      const auto ri = static_cast<std::size_t>(r);
      g_sum += gw_[ri];
      h_sum += hw_[ri];
      cover += cw_[ri];
    }
    {
      TreeNode& n = tree.node(id);
      n.value = regularized_leaf_weight(g_sum, h_sum, p_.reg_lambda, p_.reg_alpha);
      n.cover = cover;
      n.n_samples = static_cast<long long>(rows.size());
    }

    if (depth >= p_.max_depth || static_cast<long long>(rows.size()) < p_.min_samples_split) {
      return;
    }

    const int pool_size = static_cast<int>(pool_.size());
    const int k = std::min(
        pool_size, std::max(1, static_cast<int>(std::ceil(p_.max_features * pool_size))));
    std::vector<int> subset;
    if (k == pool_size) {
      subset = pool_;
    } else {
      Rng node_rng(seed_mix(p_.seed, static_cast<std::uint64_t>(id)));
      const std::vector<int> picks = node_rng.sample_without_replacement(pool_size, k);
      subset.reserve(picks.size());
      for (const int i : picks) subset.push_back(pool_[static_cast<std::size_t>(i)]);
    }

    const auto split = scan(rows, g_sum, h_sum, subset);
    if (!split) return;

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    for (const int r : rows) {
      if (x_(static_cast<std::size_t>(r), static_cast<std::size_t>(split->feature)) <=
          split->threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }

    {
      TreeNode& parent = tree.node(id);
      parent.feature = split->feature;
      parent.threshold = split->threshold;
      parent.left = static_cast<int>(tree.nodes.size());
    }
    tree.nodes.emplace_back();
    {
      TreeNode& parent = tree.node(id);
      parent.right = static_cast<int>(tree.nodes.size());
    }
    tree.nodes.emplace_back();

    stack.push_back({tree.node(id).right, std::move(right_rows), depth + 1});
    stack.push_back({tree.node(id).left, std::move(left_rows), depth + 1});
  }

  // Equal feature values accumulate into a run before joining the left sums;
  // the histogram path groups rows the same way, which keeps the two split
  // searches bit-identical under per-value binning.
  std::optional<SplitCandidate> scan(const std::vector<int>& rows, double g_sum, double h_sum,
                                     const std::vector<int>& subset) {
    for (const int r : rows) marks_[static_cast<std::size_t>(r)] = 1;
    const long long raw = static_cast<long long>(rows.size());

    std::optional<SplitCandidate> best;
    for (const int f : subset) {
      double gl = 0.0, hl = 0.0;
      long long left_raw = 0;
      double run_g = 0.0, run_h = 0.0;
      long long run_raw = 0;
      double prev_value = 0.0;
      bool have_prev = false;
      for (const int r : order_.order[static_cast<std::size_t>(f)]) {
        const auto ri = static_cast<std::size_t>(r);
        if (!marks_[ri]) continue;
        const double value = x_(ri, static_cast<std::size_t>(f));
        if (have_prev && value > prev_value) {
          gl += run_g;
          hl += run_h;
          left_raw += run_raw;
          run_g = run_h = 0.0;
          run_raw = 0;
          if (left_raw >= p_.min_samples_leaf && raw - left_raw >= p_.min_samples_leaf) {
            const double gain = regularized_split_gain(gl, hl, g_sum - gl, h_sum - hl, g_sum,
                                                       h_sum, p_.reg_lambda, p_.gamma);
            if (gain > 0.0 && (!best || gain > best->gain)) {
              best = SplitCandidate{f, 0.5 * (prev_value + value), gain};
            }
          }
        }
        run_g += gw_[ri];
        run_h += hw_[ri];
        run_raw += 1;
        prev_value = value;
        have_prev = true;
      }
    }
    for (const int r : rows) marks_[static_cast<std::size_t>(r)] = 0;
    return best;
  }

  const Matrix& x_;
  const GradHess& gh_;
  const std::vector<int>& rows_;
  const std::vector<double>& weights_;
  const std::vector<int>& pool_;
  const ColumnOrder& order_;
  RegressionTreeParams p_;
  std::vector<std::uint8_t> marks_;
  std::vector<double> gw_, hw_, cw_;
};

}  // namespace

Tree fit_regression_tree(const Matrix& x, const GradHess& gh, const std::vector<int>& rows,
                         const std::vector<double>& weights,
                         const std::vector<int>& feature_pool, const ColumnOrder& order,
                         const RegressionTreeParams& p) {
  if (gh.g.size() != x.rows() || gh.h.size() != x.rows()) {
    throw ValueError("fit_regression_tree: gradient vectors must align with rows");
  }
  if (!weights.empty() && weights.size() != rows.size()) {
    throw ValueError("fit_regression_tree: weights must align with rows");
  }
  for (const int r : rows) {
    const auto ri = static_cast<std::size_t>(r);
    if (!std::isfinite(gh.g[ri]) || !std::isfinite(gh.h[ri]) || gh.h[ri] < 0.0) {
      throw ValueError("fit_regression_tree: gradients must be finite with h >= 0");
    }
  }
  RegressionTreeBuilder builder(x, gh, rows, weights, feature_pool, order, p);
  return builder.build();
}

Tree fit_regression_tree(const Matrix& x, const GradHess& gh, const RegressionTreeParams& p) {
  std::vector<int> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<int> pool(x.cols());
  std::iota(pool.begin(), pool.end(), 0);
  const ColumnOrder order = build_column_order(x);
  return fit_regression_tree(x, gh, rows, {}, pool, order, p);
}

int tree_leaf_for(const Tree& t, std::span<const double> x) {
  int id = t.root;
  while (true) {
    const TreeNode& n = t.node(id);
    if (n.is_leaf()) return id;
    const double v = x[static_cast<std::size_t>(n.feature)];
    if (std::isnan(v)) throw ValueError("predict: NaN feature value");
    id = v <= n.threshold ? n.left : n.right;
  }
}

std::array<double, 2> predict_tree(const Tree& t, std::span<const double> x) {
  const TreeNode& leaf = t.node(tree_leaf_for(t, x));
  const double total = leaf.class_weights[0] + leaf.class_weights[1];
  if (total <= 0.0) throw ValueError("predict: leaf with zero cover");
  return {leaf.class_weights[0] / total, leaf.class_weights[1] / total};
}

double predict_tree_value(const Tree& t, std::span<const double> x) {
  return t.node(tree_leaf_for(t, x)).value;
}

}  // namespace cardio
