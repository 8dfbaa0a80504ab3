#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cardioforest/dataio.hpp"
#include "cardioforest/ensemble.hpp"

namespace cardio {

struct ConfusionCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  long long total() const { return tp + fp + fn + tn; }
};

struct MetricsRow {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  double rmse = 0.0;
  double mae = 0.0;

  std::array<double, 8> as_array() const {
    return {accuracy, balanced_accuracy, precision, recall, f1, roc_auc, rmse, mae};
  }
};

inline constexpr std::array<const char*, 8> kMetricNames = {
    "Accuracy", "Balanced Accuracy", "Precision", "Recall", "F1", "ROC_AUC", "RMSE", "MAE"};

// Positive class is 1.
ConfusionCounts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Probability that a random positive outscores a random negative, ties
// counting one half. Throws ValueError when only one class is present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Zero-denominator conventions: precision 0 when tp+fp = 0, recall 0 when
// tp+fn = 0, f1 = 0 when precision+recall = 0. RMSE/MAE are computed on the
// positive-class probabilities against the 0/1 labels. ROC-AUC is NaN when
// the labels are single-class.
MetricsRow metrics_suite(const ConfusionCounts& c, const std::vector<double>& probs,
                         const std::vector<int>& y_true);

struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 0;
};

// Within each class, indices are shuffled by seed and dealt round-robin, so
// per-fold class counts differ by at most one.
FoldAssignment stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed);

// One of the four trainable models plus its parameters.
struct ModelSpec {
  std::string id;  // cardioforest | xgb | lgbm | gbm
  ForestParams forest;
  BoostParams boost;

  bool is_forest() const { return id == "cardioforest"; }
  std::string display_name() const;
  static ModelSpec with_defaults(const std::string& id);
};

struct CvCell {
  MetricsRow test;
  MetricsRow train;
  // Error metrics recomputed on hard labels instead of probabilities,
  // reported alongside for transparency.
  double test_rmse_hard = 0.0;
  double test_mae_hard = 0.0;
  double train_rmse_hard = 0.0;
  double train_mae_hard = 0.0;
  bool failed = false;
  std::string error;
};

struct CvReport {
  struct ModelBlock {
    std::string model_id;
    std::string display_name;
    std::vector<CvCell> folds;
  };
  std::vector<ModelBlock> models;
  int k = 0;
  std::uint64_t seed = 0;
};

// Per fold: median-impute and standardize fitted on the train split only,
// model trained with a seed derived from (seed, model index, fold index),
// metrics on both splits. A failing fold is recorded and the run continues.
CvReport cross_validate(const std::vector<ModelSpec>& models, const Dataset& data, int k,
                        std::uint64_t seed, int threads = 1);

struct StabilityRow {
  double mean = 0.0;
  double sample_std = 0.0;
  double cv_percent = 0.0;
};

// cv_percent = 100 * sample std / mean; ValueError when the mean is zero.
StabilityRow stability_stats(const std::vector<double>& values);

// Fold-level values of one metric for one model (test split).
std::vector<double> metric_column(const CvReport& report, const std::string& model_id,
                                  std::size_t metric_index);

// Table-shaped CSV: Model,Fold,Accuracy,...,MAE with one row per fold.
std::string report_csv(const CvReport& report);
// JSON aggregate with per-model train/test mean, std, and cv.
std::string report_json(const CvReport& report);

}  // namespace cardio
