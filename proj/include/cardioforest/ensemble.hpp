#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cardioforest/matrix.hpp"
#include "cardioforest/tree.hpp"

namespace cardio {

struct ForestParams {
  int n_estimators = 1000;
  TreeParams tree;  // depth 20, split 5, leaf 2, max_features 0.6, ccp 0.01
  bool balanced_class_weight = true;
  bool bootstrap = true;
  bool oob_score = true;
  std::uint64_t seed = 42;
};

struct ForestModel {
  std::vector<Tree> trees;
  std::array<double, 2> class_weights{1.0, 1.0};
  std::optional<double> oob_score;
  ForestParams params;
  std::vector<std::string> feature_names;
};

enum class BoostVariant { gbm, xgb, lgbm };

std::string variant_name(BoostVariant v);
BoostVariant variant_from_name(const std::string& name);

struct BoostParams {
  BoostVariant variant = BoostVariant::xgb;
  int n_estimators = 10;
  int max_depth = 2;
  double learning_rate = 0.5;
  double subsample = 1.0;
  double colsample_bytree = 1.0;
  double reg_alpha = 0.0;
  double reg_lambda = 0.0;
  double gamma = 0.0;
  int min_child_samples = 1;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  double max_features = 1.0;
  double validation_fraction = 0.0;
  int n_iter_no_change = 0;
  double top_rate = 0.2;    // GOSS a
  double other_rate = 0.1;  // GOSS b
  int max_bins = 255;
  std::uint64_t seed = 42;

  // Tuned per-model defaults; every field stays overridable.
  static BoostParams defaults(BoostVariant v);
  void validate() const;
};

struct BoostedModel {
  BoostVariant variant = BoostVariant::xgb;
  double base_score = 0.0;  // log-odds of the training positive rate
  double learning_rate = 0.1;
  int stopped_at = 0;
  std::vector<Tree> trees;
  BoostParams params;
  std::vector<std::string> feature_names;
  std::vector<double> train_deviance;  // per accepted round
};

// Quantized feature matrix for histogram split search.
struct BinnedMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::uint8_t> bin_indices;                 // n x d
  std::vector<std::vector<double>> bin_upper_bounds;     // per feature, n_bins-1 edges

  int n_bins(std::size_t f) const { return static_cast<int>(bin_upper_bounds[f].size()) + 1; }
  std::uint8_t bin(std::size_t i, std::size_t f) const { return bin_indices[i * n_cols + f]; }
};

// Quantile bin edges over each feature's distinct values; a feature with at
// most max_bins distinct values gets one bin per value. The bin index of a
// value is the count of edges strictly below it.
BinnedMatrix build_histograms(const Matrix& x, int max_bins);

struct GossSample {
  std::vector<int> indices;     // selected rows, ascending
  std::vector<double> weights;  // aligned; 1 for kept rows, (1-a)/b for sampled
};

// Keeps the ceil(a*n) rows with the largest |gradient| (ties by row index)
// and samples ceil(b*n) of the rest uniformly at weight (1-a)/b.
GossSample goss_sample(const std::vector<double>& gradients, double top_rate, double other_rate,
                       std::uint64_t seed);

// n uniform with-replacement draws from [0, n); the out-of-bag set is the
// complement of the drawn indices.
std::vector<int> bootstrap_sample(std::size_t n, std::uint64_t seed);

// w_k = n / (K * n_k) with K = 2.
std::array<double, 2> balanced_class_weights(const std::vector<int>& y);

ForestModel fit_cardioforest(const Matrix& x, const std::vector<int>& y, const ForestParams& p,
                             int threads = 1);

struct Prediction {
  std::vector<int> labels;
  std::vector<double> probabilities;  // positive class
};

// Hard label by majority vote over per-tree argmax (ties to class 0);
// probability as the unweighted mean of per-tree leaf class frequencies.
Prediction predict_forest(const ForestModel& m, const Matrix& x, int threads = 1);

BoostedModel fit_gbm(const Matrix& x, const std::vector<int>& y, const BoostParams& p);
BoostedModel fit_xgb(const Matrix& x, const std::vector<int>& y, const BoostParams& p);
BoostedModel fit_lgbm(const Matrix& x, const std::vector<int>& y, const BoostParams& p);
BoostedModel fit_boosted(const Matrix& x, const std::vector<int>& y, const BoostParams& p);

std::vector<double> predict_boosted_margin(const BoostedModel& m, const Matrix& x);
Prediction predict_boosted(const BoostedModel& m, const Matrix& x);

double sigmoid(double margin);
// Mean binomial deviance -2[y log p + (1-y) log(1-p)] over margins.
double mean_binomial_deviance(const std::vector<double>& margins, const std::vector<int>& y,
                              const std::vector<int>& rows);

}  // namespace cardio
