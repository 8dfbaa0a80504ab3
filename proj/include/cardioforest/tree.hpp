#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cardioforest/matrix.hpp"

namespace cardio {

enum class TreeKind { classification, regression };

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<double, 2> class_weights{0.0, 0.0};  // classification trees
  double value = 0.0;                              // regression output
  double cover = 0.0;                              // sum of sample weights
  long long n_samples = 0;                         // raw row count
  double impurity = 0.0;                           // gini (classification)

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  TreeKind kind = TreeKind::classification;
  std::vector<TreeNode> nodes;
  int root = 0;
  int depth = 0;
  int n_leaves = 0;

  const TreeNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
  TreeNode& node(int id) { return nodes[static_cast<std::size_t>(id)]; }
  void refresh_stats();  // recomputes depth and n_leaves from the arena
};

struct TreeParams {
  int max_depth = 20;
  int min_samples_split = 5;
  int min_samples_leaf = 2;
  double max_features = 0.6;  // fraction of features per node, in (0, 1]
  double ccp_alpha = 0.01;
  std::uint64_t seed = 42;
};

// Aligned first/second derivatives of the loss per row.
struct GradHess {
  std::vector<double> g;
  std::vector<double> h;
};

// Per-feature row ids sorted ascending by (value, row id). Shared by every
// tree grown on the same matrix.
struct ColumnOrder {
  std::vector<std::vector<int>> order;
};
ColumnOrder build_column_order(const Matrix& x);

double gini(std::span<const double> weighted_counts);

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Exhaustive scan over the given feature subset; returns the split with the
// largest weighted impurity decrease, or nothing when no split has positive
// gain or the children would violate min_samples_leaf. Equal gains resolve to
// the lower (feature, threshold).
std::optional<SplitCandidate> best_split(const std::vector<int>& rows, const Matrix& x,
                                         const std::vector<int>& y,
                                         const std::vector<double>& w,
                                         const std::vector<int>& feature_subset,
                                         int min_samples_leaf = 1);

Tree fit_classification_tree(const Matrix& x, const std::vector<int>& y,
                             const std::vector<double>& w, const TreeParams& p);

// Forest-internal variant: `multiplicity` holds bootstrap counts per row
// (0 = out of bag) and `order` is the shared presorted column index.
Tree fit_classification_tree(const Matrix& x, const std::vector<int>& y,
                             const std::vector<double>& w, const std::vector<int>& multiplicity,
                             const ColumnOrder& order, const TreeParams& p);

// Minimal cost-complexity (weakest-link) pruning at the given alpha. The
// empirical risk is the cover-weighted misclassification rate of the leaves.
Tree prune_ccp(const Tree& t, double alpha);

// Controls for the second-order regression fitter used by the boosting
// variants. `feature_pool` narrows search to the given columns; `max_features`
// additionally subsamples the pool per node.
struct RegressionTreeParams {
  int max_depth = 2;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  double max_features = 1.0;
  double reg_lambda = 0.0;
  double reg_alpha = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

// Grows a tree maximizing the regularized second-order gain
//   1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma
// with soft-thresholded leaf weights -sign(G) max(|G|-alpha, 0)/(H+lambda).
// `rows` selects the in-sample rows; `weights` (optional, same length as
// rows) scales g, h, and cover per selected row.
Tree fit_regression_tree(const Matrix& x, const GradHess& gh, const std::vector<int>& rows,
                         const std::vector<double>& weights,
                         const std::vector<int>& feature_pool, const ColumnOrder& order,
                         const RegressionTreeParams& p);

// Convenience overload over all rows and features with unit weights.
Tree fit_regression_tree(const Matrix& x, const GradHess& gh, const RegressionTreeParams& p);

// Regularized leaf weight for a node with gradient sum g and hessian sum h.
double regularized_leaf_weight(double g_sum, double h_sum, double reg_lambda, double reg_alpha);

// Gain of a candidate split under the second-order objective.
double regularized_split_gain(double gl, double hl, double gr, double hr, double g_sum,
                              double h_sum, double reg_lambda, double gamma);

// Routes x to a leaf: x[feature] <= threshold goes left. NaN features raise
// ValueError.
int tree_leaf_for(const Tree& t, std::span<const double> x);

// Classification: normalized class weights at the routed leaf.
std::array<double, 2> predict_tree(const Tree& t, std::span<const double> x);

// Regression: scalar value at the routed leaf.
double predict_tree_value(const Tree& t, std::span<const double> x);

}  // namespace cardio
