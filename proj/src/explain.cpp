#include "cardioforest/explain.hpp"

#include <algorithm>
#include <cmath>

#include "cardioforest/errors.hpp"
#include "cardioforest/parallel.hpp"

namespace cardio {

double tree_leaf_output(const Tree& t, const TreeNode& node) {
  if (t.kind == TreeKind::regression) return node.value;
  const double total = node.class_weights[0] + node.class_weights[1];
  if (total <= 0.0) throw ValueError("tree_shap: leaf with zero cover");
  return node.class_weights[1] / total;
}

namespace {

struct PathElement {
  int feature_index = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double pweight = 0.0;
};

void extend_path(PathElement* path, int unique_depth, double zero_fraction, double one_fraction,
                 int feature_index) {
  path[unique_depth].feature_index = feature_index;
  path[unique_depth].zero_fraction = zero_fraction;
  path[unique_depth].one_fraction = one_fraction;
  path[unique_depth].pweight = unique_depth == 0 ? 1.0 : 0.0;
  for (int i = unique_depth - 1; i >= 0; --i) {
    path[i + 1].pweight +=
        one_fraction * path[i].pweight * (i + 1) / static_cast<double>(unique_depth + 1);
    path[i].pweight = zero_fraction * path[i].pweight * (unique_depth - i) /
                      static_cast<double>(unique_depth + 1);
  }
}

void unwind_path(PathElement* path, int unique_depth, int path_index) {
  const double one_fraction = path[path_index].one_fraction;
  const double zero_fraction = path[path_index].zero_fraction;
  double next_one_portion = path[unique_depth].pweight;

  for (int i = unique_depth - 1; i >= 0; --i) {
    if (one_fraction != 0.0) {
      const double tmp = path[i].pweight;
      path[i].pweight =
          next_one_portion * (unique_depth + 1) / static_cast<double>((i + 1) * one_fraction);
      next_one_portion = tmp - path[i].pweight * zero_fraction * (unique_depth - i) /
                                   static_cast<double>(unique_depth + 1);
    } else {
      path[i].pweight = path[i].pweight * (unique_depth + 1) /
                        static_cast<double>(zero_fraction * (unique_depth - i));
    }
  }
  for (int i = path_index; i < unique_depth; ++i) {
    path[i].feature_index = path[i + 1].feature_index;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_path_sum(const PathElement* path, int unique_depth, int path_index) {
  const double one_fraction = path[path_index].one_fraction;
  const double zero_fraction = path[path_index].zero_fraction;
  double next_one_portion = path[unique_depth].pweight;
  double total = 0.0;
  if (one_fraction != 0.0) {
    for (int i = unique_depth - 1; i >= 0; --i) {
      const double tmp = next_one_portion / static_cast<double>((i + 1) * one_fraction);
      total += tmp;
      next_one_portion = path[i].pweight - tmp * zero_fraction * (unique_depth - i);
    }
  } else {
    for (int i = unique_depth - 1; i >= 0; --i) {
      total += path[i].pweight / (zero_fraction * (unique_depth - i));
    }
  }
  return total * (unique_depth + 1);
}

// Polynomial-time exact Shapley recursion over the decision path, weighting
// the unseen branch of each split by its training cover. Contributions are
// accumulated into phi scaled by `scale`.
void shap_recurse(const Tree& t, std::span<const double> x, std::vector<double>& phi,
                  double scale, int node_id, int unique_depth, PathElement* parent_path,
                  double parent_zero_fraction, double parent_one_fraction,
                  int parent_feature_index) {
  PathElement* path = parent_path + unique_depth + 1;
  std::copy(parent_path, parent_path + unique_depth + 1, path);
  extend_path(path, unique_depth, parent_zero_fraction, parent_one_fraction,
              parent_feature_index);

  const TreeNode& node = t.node(node_id);
  if (node.is_leaf()) {
    const double output = tree_leaf_output(t, node);
    for (int i = 1; i <= unique_depth; ++i) {
      const double w = unwound_path_sum(path, unique_depth, i);
      const PathElement& el = path[i];
      phi[static_cast<std::size_t>(el.feature_index)] +=
          scale * w * (el.one_fraction - el.zero_fraction) * output;
    }
    return;
  }

  const double v = x[static_cast<std::size_t>(node.feature)];
  if (std::isnan(v)) throw ValueError("tree_shap: NaN feature value");
  const int hot = v <= node.threshold ? node.left : node.right;
  const int cold = hot == node.left ? node.right : node.left;
  if (node.cover <= 0.0) throw ValueError("tree_shap: node with zero cover");
  const double hot_zero_fraction = t.node(hot).cover / node.cover;
  const double cold_zero_fraction = t.node(cold).cover / node.cover;

  double incoming_zero_fraction = 1.0;
  double incoming_one_fraction = 1.0;
  // Undo an earlier split on the same feature before re-splitting on it.
  int path_index = 0;
  while (path_index <= unique_depth && path[path_index].feature_index != node.feature) {
    ++path_index;
  }
  if (path_index != unique_depth + 1) {
    incoming_zero_fraction = path[path_index].zero_fraction;
    incoming_one_fraction = path[path_index].one_fraction;
    unwind_path(path, unique_depth, path_index);
    unique_depth -= 1;
  }

  shap_recurse(t, x, phi, scale, hot, unique_depth + 1, path,
               hot_zero_fraction * incoming_zero_fraction, incoming_one_fraction, node.feature);
  shap_recurse(t, x, phi, scale, cold, unique_depth + 1, path,
               cold_zero_fraction * incoming_zero_fraction, 0.0, node.feature);
}

int tree_depth_of(const Tree& t) {
  int depth = 0;
  std::vector<std::pair<int, int>> stack{{t.root, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = t.node(id);
    if (n.is_leaf()) {
      depth = std::max(depth, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return depth;
}

std::size_t workspace_size(int depth) {
  const int max_path = depth + 2;
  return static_cast<std::size_t>((max_path * (max_path + 1)) / 2 + max_path + 1);
}

void tree_shap_into(const Tree& t, std::span<const double> x, std::vector<double>& phi,
                    double scale, std::vector<PathElement>& workspace) {
  if (t.node(t.root).cover <= 0.0) throw ValueError("tree_shap: zero root cover");
  shap_recurse(t, x, phi, scale, t.root, 0, workspace.data(), 1.0, 1.0, -1);
}

double cover_weighted_mean(const Tree& t, int node_id) {
  const TreeNode& node = t.node(node_id);
  if (node.is_leaf()) return tree_leaf_output(t, node);
  return (t.node(node.left).cover * cover_weighted_mean(t, node.left) +
          t.node(node.right).cover * cover_weighted_mean(t, node.right)) /
         node.cover;
}

}  // namespace

std::pair<std::vector<double>, double> tree_shap(const Tree& t, std::span<const double> x,
                                                 std::size_t n_features) {
  std::vector<double> phi(n_features, 0.0);
  std::vector<PathElement> workspace(workspace_size(tree_depth_of(t)));
  tree_shap_into(t, x, phi, 1.0, workspace);
  return {std::move(phi), cover_weighted_mean(t, t.root)};
}

ShapMatrix ensemble_shap(const ForestModel& m, const Matrix& x, int threads) {
  if (!m.feature_names.empty() && x.cols() != m.feature_names.size()) {
    throw SchemaError("ensemble_shap: feature count mismatch");
  }
  if (m.trees.empty()) throw ValueError("ensemble_shap: model has no trees");
  ShapMatrix out;
  out.space = "probability";
  out.values = Matrix(x.rows(), x.cols());

  double base_sum = 0.0;
  int max_depth = 0;
  for (const Tree& t : m.trees) {
    base_sum += cover_weighted_mean(t, t.root);
    max_depth = std::max(max_depth, tree_depth_of(t));
  }
  out.base_value = base_sum / static_cast<double>(m.trees.size());

  const double inv = 1.0 / static_cast<double>(m.trees.size());
  const std::size_t ws_size = workspace_size(max_depth);
  parallel_for(x.rows(), threads, [&](std::size_t i) {
    std::vector<PathElement> workspace(ws_size);
    std::vector<double> phi(x.cols(), 0.0);
    for (const Tree& t : m.trees) tree_shap_into(t, x.row(i), phi, inv, workspace);
    for (std::size_t j = 0; j < x.cols(); ++j) out.values(i, j) = phi[j];
  });
  return out;
}

ShapMatrix ensemble_shap(const BoostedModel& m, const Matrix& x, int threads) {
  if (!m.feature_names.empty() && x.cols() != m.feature_names.size()) {
    throw SchemaError("ensemble_shap: feature count mismatch");
  }
  ShapMatrix out;
  out.space = "margin";
  out.values = Matrix(x.rows(), x.cols());

  double base_sum = 0.0;
  int max_depth = 0;
  for (const Tree& t : m.trees) {
    base_sum += cover_weighted_mean(t, t.root);
    max_depth = std::max(max_depth, tree_depth_of(t));
  }
  out.base_value = m.base_score + m.learning_rate * base_sum;

  const std::size_t ws_size = workspace_size(max_depth);
  parallel_for(x.rows(), threads, [&](std::size_t i) {
    std::vector<PathElement> workspace(ws_size);
    std::vector<double> phi(x.cols(), 0.0);
    for (const Tree& t : m.trees) tree_shap_into(t, x.row(i), phi, m.learning_rate, workspace);
    for (std::size_t j = 0; j < x.cols(); ++j) out.values(i, j) = phi[j];
  });
  return out;
}

ImportanceRanking shap_summary(const ShapMatrix& s, const std::vector<std::string>& names) {
  if (names.size() != s.values.cols()) throw ValueError("shap_summary: name count mismatch");
  const std::size_t d = s.values.cols();
  const std::size_t n = s.values.rows();
  std::vector<double> importance(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) importance[j] += std::abs(s.values(i, j));
  }
  for (double& v : importance) v /= n > 0 ? static_cast<double>(n) : 1.0;

  std::vector<std::size_t> idx(d);
  for (std::size_t j = 0; j < d; ++j) idx[j] = j;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });

  ImportanceRanking ranking;
  ranking.entries.reserve(d);
  for (const std::size_t j : idx) ranking.entries.emplace_back(names[j], importance[j]);
  return ranking;
}

}  // namespace cardio
