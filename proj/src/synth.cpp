#include "cardioforest/synth.hpp"

#include <cmath>

#include "cardioforest/errors.hpp"
#include "cardioforest/rng.hpp"

namespace cardio {

std::vector<SynthColumn> SynthConfig::default_columns() {
  // rr_interval, qrs_onset, t_end, qrs_axis and t_axis are calibrated to the
  // corpus averages; the P-wave columns use physiologically plausible stand-in
  // values because the corpus averages for them are out of range.
  return {
      {"rr_interval", 865.60, 150.0, 200.0, 3000.0},
      {"p_onset", 180.0, 30.0, 0.0, 10000.0},
      {"p_end", 270.0, 30.0, 0.0, 10000.0},
      {"qrs_onset", 283.42, 25.0, 0.0, 10000.0},
      {"t_end", 688.65, 60.0, 0.0, 10000.0},
      {"p_axis", 45.0, 25.0, -180.0, 360.0},
      {"qrs_axis", 107.37, 40.0, -180.0, 360.0},
      {"t_axis", 192.55, 45.0, -180.0, 360.0},
  };
}

void SynthConfig::validate() const {
  if (n < 1) throw ConfigError("synthetic config: n must be >= 1");
  if (!(prevalence >= 0.0 && prevalence <= 1.0)) {
    throw ConfigError("synthetic config: prevalence must lie in [0, 1]");
  }
  for (const auto& col : columns) {
    if (!(col.std >= 0.0)) throw ConfigError("synthetic config: std must be >= 0");
    if (col.lo > col.hi) throw ConfigError("synthetic config: interval with min > max");
  }
}

namespace {

double truncated_gaussian(Rng& rng, double mean, double std, double lo, double hi) {
  if (std == 0.0) return mean;
  double x;
  do {
    x = mean + std * rng.next_gaussian();
  } while (x < lo || x > hi);
  return x;
}

// Supra-threshold component must stay strictly above the cut so the label
// rule reproduces the mixture choice exactly.
double strictly_above(Rng& rng, double mean, double std, double lo_exclusive, double hi) {
  double x;
  do {
    x = mean + std * rng.next_gaussian();
  } while (x <= lo_exclusive || x > hi);
  return x;
}

}  // namespace

Dataset generate_synthetic(const SynthConfig& config) {
  config.validate();
  const std::size_t n = config.n;

  // Column layout follows the standard feature order.
  const auto& order = standard_feature_names();

  Dataset ds;
  ds.features = Matrix(n, order.size());
  ds.missing.assign(n * order.size(), 0);
  ds.feature_names = order;
  ds.labels.resize(n);
  ds.subject_ids.resize(n);
  ds.study_ids.resize(n);

  std::vector<std::size_t> column_slot(config.columns.size());
  std::size_t qrs_duration_slot = 0;
  std::size_t qrs_end_slot = 0;
  std::size_t qrs_onset_slot = 0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    if (order[j] == "qrs_duration") qrs_duration_slot = j;
    if (order[j] == "qrs_end") qrs_end_slot = j;
    if (order[j] == "qrs_onset") qrs_onset_slot = j;
  }
  for (std::size_t c = 0; c < config.columns.size(); ++c) {
    bool found = false;
    for (std::size_t j = 0; j < order.size(); ++j) {
      if (order[j] == config.columns[c].name) {
        column_slot[c] = j;
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("synthetic config: unknown column " + config.columns[c].name);
  }

  Rng rng(config.seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < config.columns.size(); ++c) {
      const auto& col = config.columns[c];
      ds.features(i, column_slot[c]) = truncated_gaussian(rng, col.mean, col.std, col.lo, col.hi);
    }

    double qrs_duration;
    if (rng.next_double() < config.prevalence) {
      qrs_duration = strictly_above(rng, config.qrs_high_mean, config.qrs_high_std,
                                    kWctQrsThresholdMs, config.qrs_high_ceil);
    } else {
      qrs_duration = truncated_gaussian(rng, config.qrs_low_mean, config.qrs_low_std,
                                        config.qrs_low_floor, kWctQrsThresholdMs);
    }
    ds.features(i, qrs_duration_slot) = qrs_duration;
    const double jitter = rng.next_double() - 0.5;
    ds.features(i, qrs_end_slot) = ds.features(i, qrs_onset_slot) + qrs_duration + jitter;

    ds.labels[i] = derive_wct_label(qrs_duration);
    ds.subject_ids[i] = 10000000LL + static_cast<long long>(i);
    ds.study_ids[i] = 40000000LL + static_cast<long long>(i);
  }
  return ds;
}

}  // namespace cardio
