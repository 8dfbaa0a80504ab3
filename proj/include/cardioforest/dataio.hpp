#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cardioforest/matrix.hpp"
#include "cardioforest/table.hpp"

namespace cardio {

// Labeled numeric design matrix. Cells flagged in `missing` hold NaN.
struct Dataset {
  Matrix features;                  // n x d
  std::vector<std::uint8_t> missing;  // n x d mask, 1 = missing
  std::vector<int> labels;          // n, values in {0, 1}
  std::vector<std::string> feature_names;
  std::vector<long long> subject_ids;
  std::vector<long long> study_ids;

  std::size_t n_rows() const { return features.rows(); }
  std::size_t n_cols() const { return features.cols(); }
  bool is_missing(std::size_t i, std::size_t j) const {
    return missing[i * features.cols() + j] != 0;
  }
  void set_missing(std::size_t i, std::size_t j, bool m) {
    missing[i * features.cols() + j] = m ? 1 : 0;
  }
};

struct ImputerState {
  std::vector<std::string> fitted_columns;
  std::vector<double> medians;  // aligned with fitted_columns
};

// Bijection between category text and codes 0..k-1 (lexicographic order).
struct LabelCodec {
  std::vector<std::string> categories;  // index = code

  int encode(const std::string& value) const;
  const std::string& decode(int code) const;
  std::size_t size() const { return categories.size(); }
};

// Closed per-column plausibility intervals, in the column's native units.
struct PlausibilityRules {
  struct Interval {
    double min;
    double max;
  };
  std::map<std::string, Interval> intervals;
};

// Intervals for the standard measurement columns: rr_interval in
// [200, 3000] ms, onsets/ends/durations in [0, 10000] ms, axes in
// [-180, 360] degrees.
PlausibilityRules default_plausibility_rules();

// The faulty-conduction rule on QRS duration, strictly greater than 120 ms.
inline constexpr double kWctQrsThresholdMs = 120.0;
int derive_wct_label(double qrs_duration_ms);

// Keeps the first occurrence of each key tuple, preserving row order.
// Returns the deduplicated table and the number of rows removed.
std::pair<RawTable, std::size_t> deduplicate(const RawTable& t,
                                             const std::vector<std::string>& keys);

// Rewrites "YYYY-MM-DD HH:MM:SS" text cells as integer seconds since the
// Unix epoch (UTC). Missing cells stay missing.
RawTable normalize_timestamps(const RawTable& t, const std::vector<std::string>& columns);

// Replaces out-of-interval numeric values with missing. Returns the repaired
// table and per-column counts of replaced cells.
std::pair<RawTable, std::map<std::string, std::size_t>> repair_implausible(
    const RawTable& t, const PlausibilityRules& rules);

ImputerState fit_impute_median(const RawTable& t, const std::vector<std::string>& columns);

// Fills missing cells in fitted columns with the stored medians. Returns the
// table and per-column counts of filled cells.
std::pair<RawTable, std::map<std::string, std::size_t>> apply_impute(const RawTable& t,
                                                                     const ImputerState& s);

std::pair<std::vector<int>, LabelCodec> encode_labels(const std::vector<std::string>& column);

// Extracts a Dataset from a prepared table: the named feature columns (text
// cells are an error, missing cells set the mask), integer labels from
// `label_column` (empty name = unlabeled, labels all zero), and subject/study
// ids when those columns exist.
Dataset dataset_from_table(const RawTable& t, const std::vector<std::string>& feature_names,
                           const std::string& label_column);

// Converts a Dataset back to a table (ids, features, label).
RawTable table_from_dataset(const Dataset& d, const std::string& label_column);

// The measurement feature columns every pipeline consumes, in order.
const std::vector<std::string>& standard_feature_names();

}  // namespace cardio
