#include "cardioforest/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "cardioforest/csv.hpp"
#include "cardioforest/errors.hpp"
#include "cardioforest/features.hpp"
#include "cardioforest/parallel.hpp"
#include "cardioforest/rng.hpp"

#include <json.hpp>

namespace cardio {

ConfusionCounts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) throw ValueError("confusion: length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1) {
      (y_pred[i] == 1 ? c.tp : c.fn) += 1;
    } else {
      (y_pred[i] == 1 ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw ValueError("roc_auc: length mismatch");
  const std::size_t n = scores.size();
  long long pos = 0;
  for (const int y : labels) pos += y;
  const long long neg = static_cast<long long>(n) - pos;
  if (pos == 0 || neg == 0) throw ValueError("roc_auc: both classes must be present");

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return scores[static_cast<std::size_t>(a)] <
                                       scores[static_cast<std::size_t>(b)]; });

  // Sum of average ranks of positives (ties share their rank range's mean).
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[static_cast<std::size_t>(idx[j])] ==
                        scores[static_cast<std::size_t>(idx[i])]) {
      ++j;
    }
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t) {
      if (labels[static_cast<std::size_t>(idx[t])] == 1) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

MetricsRow metrics_suite(const ConfusionCounts& c, const std::vector<double>& probs,
                         const std::vector<int>& y_true) {
  if (probs.size() != y_true.size()) throw ValueError("metrics_suite: length mismatch");
  for (const double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValueError("metrics_suite: probabilities outside [0,1]");
  }
  MetricsRow m;
  const double n = static_cast<double>(c.total());
  m.accuracy = n > 0.0 ? static_cast<double>(c.tp + c.tn) / n : 0.0;
  m.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  const double specificity =
      (c.tn + c.fp) > 0 ? static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp) : 0.0;
  m.balanced_accuracy = 0.5 * (m.recall + specificity);
  m.precision =
      (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;

  bool has0 = false, has1 = false;
  for (const int y : y_true) (y == 1 ? has1 : has0) = true;
  m.roc_auc = (has0 && has1) ? roc_auc(probs, y_true)
                             : std::numeric_limits<double>::quiet_NaN();

  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double diff = probs[i] - static_cast<double>(y_true[i]);
    se += diff * diff;
    ae += std::abs(diff);
  }
  const double count = probs.empty() ? 1.0 : static_cast<double>(probs.size());
  m.rmse = std::sqrt(se / count);
  m.mae = ae / count;
  return m;
}

FoldAssignment stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
  const std::size_t n = labels.size();
  std::vector<std::vector<int>> by_class(2);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ValueError("stratified_kfold: labels in {0,1}");
    by_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  for (const auto& members : by_class) {
    if (!members.empty() && members.size() < static_cast<std::size_t>(k)) {
      throw ConfigError("stratified_kfold: a class has fewer members than folds");
    }
  }
  if (n < static_cast<std::size_t>(k)) throw ConfigError("stratified_kfold: k exceeds n");

  FoldAssignment fa;
  fa.k = k;
  fa.fold_of.assign(n, 0);
  Rng rng(seed_mix(seed, kFoldTag));
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      fa.fold_of[static_cast<std::size_t>(members[i])] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
  }
  return fa;
}

std::string ModelSpec::display_name() const {
  if (id == "cardioforest") return "CardioForest";
  if (id == "xgb") return "XGBoost";
  if (id == "lgbm") return "LightGBM";
  if (id == "gbm") return "GradientBoosting";
  return id;
}

ModelSpec ModelSpec::with_defaults(const std::string& id) {
  if (id != "cardioforest" && id != "xgb" && id != "lgbm" && id != "gbm") {
    throw ConfigError("unknown model id: " + id);
  }
  ModelSpec spec;
  spec.id = id;
  if (id == "cardioforest") {
    spec.forest = ForestParams{};
  } else {
    spec.boost = BoostParams::defaults(variant_from_name(id));
  }
  return spec;
}

namespace {

// Extracts the rows of `data` listed in `rows` as a plain matrix plus labels.
void take_rows(const Dataset& data, const std::vector<int>& rows, Matrix& x_out,
               std::vector<int>& y_out, std::vector<std::uint8_t>& miss_out) {
  const std::size_t d = data.n_cols();
  x_out = Matrix(rows.size(), d);
  y_out.resize(rows.size());
  miss_out.assign(rows.size() * d, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<std::size_t>(rows[i]);
    for (std::size_t j = 0; j < d; ++j) {
      x_out(i, j) = data.features(r, j);
      miss_out[i * d + j] = data.missing[r * d + j];
    }
    y_out[i] = data.labels[r];
  }
}

// Column medians over non-missing entries; FitError when a column is fully
// missing.
std::vector<double> fit_matrix_medians(const Matrix& x, const std::vector<std::uint8_t>& miss,
                                       const std::vector<std::string>& names) {
  std::vector<double> medians(x.cols());
  std::vector<double> values;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    values.clear();
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (!miss[i * x.cols() + j]) values.push_back(x(i, j));
    }
    if (values.empty()) throw FitError("impute: column " + names[j] + " is fully missing");
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    medians[j] = (m % 2 == 1) ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
  }
  return medians;
}

void fill_missing(Matrix& x, const std::vector<std::uint8_t>& miss,
                  const std::vector<double>& medians) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (miss[i * x.cols() + j]) x(i, j) = medians[j];
    }
  }
}

MetricsRow evaluate_split(const std::vector<int>& y, const Prediction& pred) {
  return metrics_suite(confusion(y, pred.labels), pred.probabilities, y);
}

}  // namespace

CvReport cross_validate(const std::vector<ModelSpec>& models, const Dataset& data, int k,
                        std::uint64_t seed, int threads) {
  CvReport report;
  report.k = k;
  report.seed = seed;
  const FoldAssignment folds = stratified_kfold(data.labels, k, seed);

  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const ModelSpec& spec = models[mi];
    CvReport::ModelBlock block;
    block.model_id = spec.id;
    block.display_name = spec.display_name();
    block.folds.resize(static_cast<std::size_t>(k));

    for (int fold = 0; fold < k; ++fold) {
      CvCell& cell = block.folds[static_cast<std::size_t>(fold)];
      try {
        std::vector<int> train_rows, test_rows;
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
          (folds.fold_of[i] == fold ? test_rows : train_rows).push_back(static_cast<int>(i));
        }

        Matrix x_train, x_test;
        std::vector<int> y_train, y_test;
        std::vector<std::uint8_t> miss_train, miss_test;
        take_rows(data, train_rows, x_train, y_train, miss_train);
        take_rows(data, test_rows, x_test, y_test, miss_test);

        // Preprocessing fitted on the train split only.
        const std::vector<double> medians =
            fit_matrix_medians(x_train, miss_train, data.feature_names);
        fill_missing(x_train, miss_train, medians);
        fill_missing(x_test, miss_test, medians);
        const StandardizerState scaler = fit_standardize(x_train);
        x_train = apply_standardize(x_train, scaler);
        x_test = apply_standardize(x_test, scaler);

        const std::uint64_t train_seed =
            seed_mix(seed_mix(seed, kModelSeedTag + mi), static_cast<std::uint64_t>(fold));

        Prediction train_pred, test_pred;
        if (spec.is_forest()) {
          ForestParams fp = spec.forest;
          fp.seed = train_seed;
          const ForestModel model = fit_cardioforest(x_train, y_train, fp, threads);
          train_pred = predict_forest(model, x_train, threads);
          test_pred = predict_forest(model, x_test, threads);
        } else {
          BoostParams bp = spec.boost;
          bp.seed = train_seed;
          const BoostedModel model = fit_boosted(x_train, y_train, bp);
          train_pred = predict_boosted(model, x_train);
          test_pred = predict_boosted(model, x_test);
        }
        cell.train = evaluate_split(y_train, train_pred);
        cell.test = evaluate_split(y_test, test_pred);

        const auto hard_errors = [](const std::vector<int>& y, const Prediction& pred) {
          const ConfusionCounts c = confusion(y, pred.labels);
          const double error_rate =
              c.total() > 0 ? static_cast<double>(c.fp + c.fn) / static_cast<double>(c.total())
                            : 0.0;
          return std::pair<double, double>{std::sqrt(error_rate), error_rate};
        };
        std::tie(cell.train_rmse_hard, cell.train_mae_hard) = hard_errors(y_train, train_pred);
        std::tie(cell.test_rmse_hard, cell.test_mae_hard) = hard_errors(y_test, test_pred);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }
    }
    report.models.push_back(std::move(block));
  }
  return report;
}

StabilityRow stability_stats(const std::vector<double>& values) {
  if (values.size() < 2) throw ValueError("stability_stats: need at least 2 folds");
  StabilityRow row;
  double sum = 0.0;
  for (const double v : values) sum += v;
  row.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) {
    const double diff = v - row.mean;
    ss += diff * diff;
  }
  row.sample_std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  if (row.mean == 0.0) throw ValueError("stability_stats: mean is zero");
  row.cv_percent = 100.0 * row.sample_std / row.mean;
  return row;
}

std::vector<double> metric_column(const CvReport& report, const std::string& model_id,
                                  std::size_t metric_index) {
  for (const auto& block : report.models) {
    if (block.model_id != model_id) continue;
    std::vector<double> values;
    for (const auto& cell : block.folds) {
      if (!cell.failed) values.push_back(cell.test.as_array()[metric_index]);
    }
    return values;
  }
  throw ValueError("metric_column: model not in report: " + model_id);
}

std::string report_csv(const CvReport& report) {
  std::ostringstream out;
  out << "Model,Fold";
  for (const char* name : kMetricNames) out << ',' << name;
  out << '\n';
  for (const auto& block : report.models) {
    for (std::size_t f = 0; f < block.folds.size(); ++f) {
      out << csv_escape(block.display_name) << ',' << (f + 1);
      const CvCell& cell = block.folds[f];
      for (const double v : cell.test.as_array()) {
        out << ',';
        if (!cell.failed && !std::isnan(v)) out << format_double(v);
      }
      out << '\n';
    }
  }
  return out.str();
}

namespace {

nlohmann::json aggregate_entry(const std::vector<double>& values) {
  nlohmann::json entry;
  if (values.size() >= 2) {
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    const double std_ = std::sqrt(ss / static_cast<double>(values.size() - 1));
    entry["mean"] = mean;
    entry["std"] = std_;
    if (mean != 0.0) entry["cv_percent"] = 100.0 * std_ / mean;
    else entry["cv_percent"] = nullptr;
  } else if (values.size() == 1) {
    entry["mean"] = values[0];
    entry["std"] = 0.0;
    entry["cv_percent"] = 0.0;
  } else {
    entry["mean"] = nullptr;
  }
  return entry;
}

nlohmann::json aggregate_json(const CvReport::ModelBlock& block, bool test_split) {
  nlohmann::json agg;
  for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
    std::vector<double> values;
    for (const auto& cell : block.folds) {
      if (cell.failed) continue;
      const auto arr = test_split ? cell.test.as_array() : cell.train.as_array();
      if (!std::isnan(arr[m])) values.push_back(arr[m]);
    }
    agg[kMetricNames[m]] = aggregate_entry(values);
  }
  std::vector<double> rmse_hard, mae_hard;
  for (const auto& cell : block.folds) {
    if (cell.failed) continue;
    rmse_hard.push_back(test_split ? cell.test_rmse_hard : cell.train_rmse_hard);
    mae_hard.push_back(test_split ? cell.test_mae_hard : cell.train_mae_hard);
  }
  agg["RMSE (hard labels)"] = aggregate_entry(rmse_hard);
  agg["MAE (hard labels)"] = aggregate_entry(mae_hard);
  return agg;
}

}  // namespace

std::string report_json(const CvReport& report) {
  nlohmann::json doc;
  doc["k"] = report.k;
  doc["seed"] = report.seed;
  nlohmann::json models = nlohmann::json::array();
  for (const auto& block : report.models) {
    nlohmann::json entry;
    entry["model"] = block.display_name;
    entry["model_id"] = block.model_id;
    entry["train"] = aggregate_json(block, false);
    entry["test"] = aggregate_json(block, true);
    int failed = 0;
    for (const auto& cell : block.folds) failed += cell.failed ? 1 : 0;
    entry["failed_folds"] = failed;
    models.push_back(std::move(entry));
  }
  doc["models"] = std::move(models);
  return doc.dump(2) + "\n";
}

}  // namespace cardio
