#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cardioforest/ensemble.hpp"
#include "cardioforest/matrix.hpp"
#include "cardioforest/tree.hpp"

namespace cardio {

// Per-sample, per-feature attributions. For a forest the values live in
// probability space; for a boosted model in margin space. Local accuracy:
// base_value + sum of a row's values equals the model output for that row.
struct ShapMatrix {
  Matrix values;       // n x d
  double base_value = 0.0;
  std::string space;   // "probability" or "margin"
};

struct ImportanceRanking {
  std::vector<std::pair<std::string, double>> entries;  // (name, mean |phi|), descending
};

// Exact per-tree Shapley attributions under the cover-weighted conditional
// expectation stored in the tree (path-dependent background). Returns the
// phi vector and the cover-weighted mean output.
std::pair<std::vector<double>, double> tree_shap(const Tree& t, std::span<const double> x,
                                                 std::size_t n_features);

// Output of a leaf in the space SHAP is computed in: positive-class
// frequency for classification trees, raw value for regression trees.
double tree_leaf_output(const Tree& t, const TreeNode& node);

ShapMatrix ensemble_shap(const ForestModel& m, const Matrix& x, int threads = 1);
ShapMatrix ensemble_shap(const BoostedModel& m, const Matrix& x, int threads = 1);

// Ranks features by mean |attribution|; ties keep feature-index order.
ImportanceRanking shap_summary(const ShapMatrix& s, const std::vector<std::string>& names);

}  // namespace cardio
