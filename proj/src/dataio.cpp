#include "cardioforest/dataio.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <unordered_map>

#include "cardioforest/errors.hpp"

namespace cardio {

int LabelCodec::encode(const std::string& value) const {
  const auto it = std::lower_bound(categories.begin(), categories.end(), value);
  if (it == categories.end() || *it != value) {
    throw ValueError("unknown category: " + value);
  }
  return static_cast<int>(it - categories.begin());
}

const std::string& LabelCodec::decode(int code) const {
  if (code < 0 || static_cast<std::size_t>(code) >= categories.size()) {
    throw ValueError("code out of range: " + std::to_string(code));
  }
  return categories[static_cast<std::size_t>(code)];
}

PlausibilityRules default_plausibility_rules() {
  PlausibilityRules rules;
  rules.intervals["rr_interval"] = {200.0, 3000.0};
  for (const char* name : {"p_onset", "p_end", "qrs_onset", "qrs_end", "t_end", "qrs_duration"}) {
    rules.intervals[name] = {0.0, 10000.0};
  }
  for (const char* name : {"p_axis", "qrs_axis", "t_axis"}) {
    rules.intervals[name] = {-180.0, 360.0};
  }
  return rules;
}

int derive_wct_label(double qrs_duration_ms) {
  if (!std::isfinite(qrs_duration_ms) || qrs_duration_ms < 0.0) {
    throw ValueError("qrs_duration must be finite and non-negative");
  }
  return qrs_duration_ms > kWctQrsThresholdMs ? 1 : 0;
}

namespace {

// Canonical string form of a cell for key comparison.
std::string cell_key(const Cell& c) {
  if (cell_missing(c)) return "\x01missing";
  if (cell_numeric(c)) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "\x02%.17g", std::get<double>(c));
    return buf;
  }
  return "\x03" + std::get<std::string>(c);
}

}  // namespace

std::pair<RawTable, std::size_t> deduplicate(const RawTable& t,
                                             const std::vector<std::string>& keys) {
  std::vector<std::size_t> key_cols;
  key_cols.reserve(keys.size());
  for (const auto& k : keys) {
    const auto idx = t.find_column(k);
    if (!idx) throw SchemaError("deduplicate: missing key column " + k);
    key_cols.push_back(*idx);
  }

  const std::size_t n = t.n_rows();
  std::vector<std::size_t> kept;
  kept.reserve(n);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    std::string key;
    for (const std::size_t c : key_cols) {
      key += cell_key(t.columns[c].cells[i]);
      key.push_back('\x1f');
    }
    if (seen.insert(std::move(key)).second) kept.push_back(i);
  }

  RawTable out;
  out.columns.resize(t.n_cols());
  out.non_numeric_flags = t.non_numeric_flags;
  for (std::size_t j = 0; j < t.n_cols(); ++j) {
    out.columns[j].name = t.columns[j].name;
    out.columns[j].cells.reserve(kept.size());
    for (const std::size_t i : kept) out.columns[j].cells.push_back(t.columns[j].cells[i]);
  }
  return {std::move(out), n - kept.size()};
}

namespace {

long long parse_timestamp_seconds(const std::string& text, std::size_t row) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char trailing = '\0';
  const int matched =
      std::sscanf(text.c_str(), "%4d-%2d-%2d %2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &trailing);
  if (matched != 6 || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60 ||
      h < 0 || mi < 0 || s < 0) {
    throw ValueError("unparseable timestamp at row " + std::to_string(row) + ": " + text);
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw ValueError("invalid calendar date at row " + std::to_string(row) + ": " + text);
  }
  const sys_days days{ymd};
  return duration_cast<seconds>(days.time_since_epoch()).count() + h * 3600LL + mi * 60LL + s;
}

}  // namespace

RawTable normalize_timestamps(const RawTable& t, const std::vector<std::string>& columns) {
  RawTable out = t;
  for (const auto& name : columns) {
    auto& col = out.column(name);
    for (std::size_t i = 0; i < col.cells.size(); ++i) {
      Cell& cell = col.cells[i];
      if (cell_missing(cell)) continue;
      if (!cell_text(cell)) {
        throw ValueError("timestamp column " + name + " has a non-text cell at row " +
                         std::to_string(i));
      }
      cell = static_cast<double>(parse_timestamp_seconds(std::get<std::string>(cell), i));
    }
  }
  return out;
}

std::pair<RawTable, std::map<std::string, std::size_t>> repair_implausible(
    const RawTable& t, const PlausibilityRules& rules) {
  RawTable out = t;
  std::map<std::string, std::size_t> flagged;
  for (const auto& [name, interval] : rules.intervals) {
    const auto idx = out.find_column(name);
    if (!idx) continue;
    std::size_t count = 0;
    for (Cell& cell : out.columns[*idx].cells) {
      if (!cell_numeric(cell)) continue;
      const double v = std::get<double>(cell);
      if (v < interval.min || v > interval.max || !std::isfinite(v)) {
        cell = std::monostate{};
        ++count;
      }
    }
    flagged[name] = count;
  }
  return {std::move(out), std::move(flagged)};
}

ImputerState fit_impute_median(const RawTable& t, const std::vector<std::string>& columns) {
  ImputerState state;
  for (const auto& name : columns) {
    const Column& col = t.column(name);
    std::vector<double> values;
    values.reserve(col.cells.size());
    for (const Cell& cell : col.cells) {
      if (cell_numeric(cell)) values.push_back(std::get<double>(cell));
    }
    if (values.empty()) {
      throw FitError("fit_impute_median: column " + name + " has no numeric values");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double median =
        (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    state.fitted_columns.push_back(name);
    state.medians.push_back(median);
  }
  return state;
}

std::pair<RawTable, std::map<std::string, std::size_t>> apply_impute(const RawTable& t,
                                                                     const ImputerState& s) {
  RawTable out = t;
  std::map<std::string, std::size_t> imputed;
  for (std::size_t k = 0; k < s.fitted_columns.size(); ++k) {
    auto& col = out.column(s.fitted_columns[k]);
    std::size_t count = 0;
    for (Cell& cell : col.cells) {
      if (cell_missing(cell)) {
        cell = s.medians[k];
        ++count;
      }
    }
    imputed[s.fitted_columns[k]] = count;
  }
  return {std::move(out), std::move(imputed)};
}

std::pair<std::vector<int>, LabelCodec> encode_labels(const std::vector<std::string>& column) {
  if (column.empty()) throw ValueError("encode_labels: empty column");
  std::set<std::string> distinct(column.begin(), column.end());
  LabelCodec codec;
  codec.categories.assign(distinct.begin(), distinct.end());
  std::vector<int> codes;
  codes.reserve(column.size());
  for (const auto& value : column) codes.push_back(codec.encode(value));
  return {std::move(codes), std::move(codec)};
}

Dataset dataset_from_table(const RawTable& t, const std::vector<std::string>& feature_names,
                           const std::string& label_column) {
  const std::size_t n = t.n_rows();
  const std::size_t d = feature_names.size();
  Dataset ds;
  ds.features = Matrix(n, d);
  ds.missing.assign(n * d, 0);
  ds.feature_names = feature_names;

  for (std::size_t j = 0; j < d; ++j) {
    const Column& col = t.column(feature_names[j]);
    for (std::size_t i = 0; i < n; ++i) {
      const Cell& cell = col.cells[i];
      if (cell_numeric(cell)) {
        ds.features(i, j) = std::get<double>(cell);
      } else if (cell_missing(cell)) {
        ds.features(i, j) = std::numeric_limits<double>::quiet_NaN();
        ds.set_missing(i, j, true);
      } else {
        throw ValueError("feature column " + feature_names[j] + " has text cell at row " +
                         std::to_string(i));
      }
    }
  }

  ds.labels.assign(n, 0);
  if (!label_column.empty()) {
    const Column& labels = t.column(label_column);
    for (std::size_t i = 0; i < n; ++i) {
      const Cell& cell = labels.cells[i];
      if (!cell_numeric(cell)) {
        throw ValueError("label column must be numeric with no gaps, row " + std::to_string(i));
      }
      const double v = std::get<double>(cell);
      if (v != 0.0 && v != 1.0) {
        throw ValueError("label outside {0,1} at row " + std::to_string(i));
      }
      ds.labels[i] = static_cast<int>(v);
    }
  }

  const auto read_ids = [&](const char* name, std::vector<long long>& out_ids) {
    const auto idx = t.find_column(name);
    if (!idx) return;
    out_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Cell& cell = t.columns[*idx].cells[i];
      out_ids[i] = cell_numeric(cell) ? static_cast<long long>(std::get<double>(cell))
                                      : static_cast<long long>(i);
    }
  };
  read_ids("subject_id", ds.subject_ids);
  read_ids("study_id", ds.study_ids);
  return ds;
}

RawTable table_from_dataset(const Dataset& d, const std::string& label_column) {
  RawTable t;
  const std::size_t n = d.n_rows();
  const auto push_id_column = [&](const char* name, const std::vector<long long>& ids) {
    if (ids.empty()) return;
    Column col;
    col.name = name;
    col.cells.reserve(n);
    for (const long long v : ids) col.cells.emplace_back(static_cast<double>(v));
    t.columns.push_back(std::move(col));
  };
  push_id_column("subject_id", d.subject_ids);
  push_id_column("study_id", d.study_ids);

  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    Column col;
    col.name = d.feature_names[j];
    col.cells.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (d.is_missing(i, j)) {
        col.cells.emplace_back(std::monostate{});
      } else {
        col.cells.emplace_back(d.features(i, j));
      }
    }
    t.columns.push_back(std::move(col));
  }

  Column labels;
  labels.name = label_column;
  labels.cells.reserve(n);
  for (const int y : d.labels) labels.cells.emplace_back(static_cast<double>(y));
  t.columns.push_back(std::move(labels));
  t.non_numeric_flags.assign(t.columns.size(), 0);
  return t;
}

const std::vector<std::string>& standard_feature_names() {
  static const std::vector<std::string> names = {
      "rr_interval", "p_onset", "p_end",    "qrs_onset", "qrs_end",
      "t_end",       "p_axis",  "qrs_axis", "t_axis",    "qrs_duration"};
  return names;
}

}  // namespace cardio
