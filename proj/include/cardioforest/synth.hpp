#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardioforest/dataio.hpp"

namespace cardio {

// Per-feature generating distribution: a Gaussian truncated to the feature's
// plausibility interval.
struct SynthColumn {
  std::string name;
  double mean;
  double std;
  double lo;
  double hi;
};

// Configuration for the calibrated synthetic generator. The defaults target
// the measurement summary statistics of the source corpus; qrs_duration is a
// two-component mixture split at 120 ms so the positive fraction equals
// `prevalence` in expectation.
struct SynthConfig {
  std::size_t n = 1000;
  double prevalence = 0.1546;
  std::uint64_t seed = 42;
  std::vector<SynthColumn> columns = default_columns();

  // Mixture components for qrs_duration (ms).
  double qrs_low_mean = 105.4;
  double qrs_low_std = 10.0;
  double qrs_low_floor = 60.0;
  double qrs_high_mean = 132.0;
  double qrs_high_std = 9.0;
  double qrs_high_ceil = 200.0;

  static std::vector<SynthColumn> default_columns();
  void validate() const;
};

// Draws a dataset with the ten standard measurement features plus ids and
// labels. Fully deterministic for a given config; the label column is exactly
// derive_wct_label(qrs_duration) row by row, and qrs_end reproduces
// qrs_onset + qrs_duration up to +-0.5 ms of noise.
Dataset generate_synthetic(const SynthConfig& config);

}  // namespace cardio
