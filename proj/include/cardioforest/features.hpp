#pragma once

#include <cstddef>
#include <vector>

#include "cardioforest/dataio.hpp"
#include "cardioforest/matrix.hpp"

namespace cardio {

struct StandardizerState {
  std::vector<double> means;
  std::vector<double> stds;  // sample std; 0 marks a constant column
};

struct PcaState {
  std::vector<double> mean;              // d
  Matrix components;                     // k x d, orthonormal rows
  std::vector<double> explained_variance_ratio;  // k, non-increasing
};

struct RollingStats {
  std::size_t window = 0;
  std::vector<double> means;  // aligned to input from index window-1 on
  std::vector<double> stds;
  std::vector<double> skews;
};

StandardizerState fit_standardize(const Matrix& x);
// Columns with zero variance map to all-zeros.
Matrix apply_standardize(const Matrix& x, const StandardizerState& state);

// PCA of the sample covariance (divisor n-1). Components are returned in
// descending eigenvalue order; the first nonzero entry of each component is
// made positive so fits are reproducible.
PcaState fit_pca(const Matrix& x, std::size_t k);
Matrix apply_pca(const Matrix& x, const PcaState& state);

// Greedy scan in column order: column j is dropped when |Pearson r| with an
// already kept column reaches the threshold. Zero-variance columns never
// correlate with anything and are always kept.
std::vector<std::size_t> correlation_prune(const Matrix& x, double threshold);

// Appends qrs_span, qrs_rr_ratio, and hr_bpm columns; rows with
// rr_interval <= 0 get missing ratio/heart-rate cells.
Dataset derive_interval_features(const Dataset& d);

// Windowed mean, sample std, and adjusted Fisher-Pearson skewness.
RollingStats rolling_stats(const std::vector<double>& series, std::size_t window);

double pearson(const Matrix& x, std::size_t col_a, std::size_t col_b);

}  // namespace cardio
