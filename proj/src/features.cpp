#include "cardioforest/features.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "cardioforest/errors.hpp"

namespace cardio {

StandardizerState fit_standardize(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) throw FitError("fit_standardize: need at least 2 rows");
  StandardizerState state;
  state.means.resize(d);
  state.stds.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = x(i, j) - mean;
      ss += diff * diff;
    }
    state.means[j] = mean;
    state.stds[j] = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return state;
}

Matrix apply_standardize(const Matrix& x, const StandardizerState& state) {
  if (x.cols() != state.means.size()) {
    throw SchemaError("apply_standardize: column count mismatch");
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double mean = state.means[j];
    const double std_ = state.stds[j];
    for (std::size_t i = 0; i < x.rows(); ++i) {
      out(i, j) = std_ == 0.0 ? 0.0 : (x(i, j) - mean) / std_;
    }
  }
  return out;
}

PcaState fit_pca(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (k < 1 || k > d) throw ConfigError("fit_pca: k must lie in [1, d]");
  if (n < 2) throw FitError("fit_pca: need at least 2 rows");

  PcaState state;
  state.mean.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x(i, j);
    state.mean[j] = sum / static_cast<double>(n);
  }

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                              static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      const double da = x(i, a) - state.mean[a];
      for (std::size_t b = a; b < d; ++b) {
        cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            da * (x(i, b) - state.mean[b]);
      }
    }
  }
  cov /= static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          cov(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
    }
  }
  if (!cov.allFinite()) throw ValueError("fit_pca: covariance is not finite");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw ValueError("fit_pca: eigendecomposition failed");
  const Eigen::VectorXd eigenvalues = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd eigenvectors = solver.eigenvectors();

  double total = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    total += std::max(0.0, eigenvalues(i));
  }

  state.components = Matrix(k, d);
  state.explained_variance_ratio.resize(k);
  for (std::size_t r = 0; r < k; ++r) {
    const Eigen::Index src = static_cast<Eigen::Index>(d - 1 - r);
    Eigen::VectorXd v = eigenvectors.col(src);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) != 0.0) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    for (std::size_t j = 0; j < d; ++j) state.components(r, j) = v(static_cast<Eigen::Index>(j));
    state.explained_variance_ratio[r] =
        total > 0.0 ? std::max(0.0, eigenvalues(src)) / total : 0.0;
  }
  return state;
}

Matrix apply_pca(const Matrix& x, const PcaState& state) {
  const std::size_t d = state.mean.size();
  if (x.cols() != d) throw SchemaError("apply_pca: column count mismatch");
  const std::size_t k = state.components.rows();
  Matrix out(x.rows(), k);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        dot += (x(i, j) - state.mean[j]) * state.components(r, j);
      }
      out(i, r) = dot;
    }
  }
  return out;
}

double pearson(const Matrix& x, std::size_t col_a, std::size_t col_b) {
  const std::size_t n = x.rows();
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += x(i, col_a);
    mean_b += x(i, col_b);
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = x(i, col_a) - mean_a;
    const double db = x(i, col_b) - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<std::size_t> correlation_prune(const Matrix& x, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("correlation_prune: threshold must lie in (0, 1]");
  }
  if (x.rows() < 2) throw ConfigError("correlation_prune: need at least 2 rows");
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    bool drop = false;
    for (const std::size_t i : kept) {
      if (std::abs(pearson(x, j, i)) >= threshold) {
        drop = true;
        break;
      }
    }
    if (!drop) kept.push_back(j);
  }
  return kept;
}

Dataset derive_interval_features(const Dataset& d) {
  std::size_t rr = 0, qrs_on = 0, qrs_end = 0, qrs_dur = 0;
  bool found_rr = false, found_on = false, found_end = false, found_dur = false;
  for (std::size_t j = 0; j < d.feature_names.size(); ++j) {
    if (d.feature_names[j] == "rr_interval") rr = j, found_rr = true;
    if (d.feature_names[j] == "qrs_onset") qrs_on = j, found_on = true;
    if (d.feature_names[j] == "qrs_end") qrs_end = j, found_end = true;
    if (d.feature_names[j] == "qrs_duration") qrs_dur = j, found_dur = true;
  }
  if (!found_rr || !found_on || !found_end || !found_dur) {
    throw SchemaError("derive_interval_features: source columns missing");
  }

  const std::size_t n = d.n_rows();
  const std::size_t old_d = d.n_cols();
  const std::size_t new_d = old_d + 3;
  Dataset out;
  out.features = Matrix(n, new_d);
  out.missing.assign(n * new_d, 0);
  out.labels = d.labels;
  out.subject_ids = d.subject_ids;
  out.study_ids = d.study_ids;
  out.feature_names = d.feature_names;
  out.feature_names.push_back("qrs_span");
  out.feature_names.push_back("qrs_rr_ratio");
  out.feature_names.push_back("hr_bpm");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < old_d; ++j) {
      out.features(i, j) = d.features(i, j);
      out.set_missing(i, j, d.is_missing(i, j));
    }
    const bool span_ok = !d.is_missing(i, qrs_end) && !d.is_missing(i, qrs_on);
    if (span_ok) {
      out.features(i, old_d) = d.features(i, qrs_end) - d.features(i, qrs_on);
    } else {
      out.features(i, old_d) = nan;
      out.set_missing(i, old_d, true);
    }
    const bool rr_ok = !d.is_missing(i, rr) && d.features(i, rr) > 0.0;
    if (rr_ok && !d.is_missing(i, qrs_dur)) {
      out.features(i, old_d + 1) = d.features(i, qrs_dur) / d.features(i, rr);
    } else {
      out.features(i, old_d + 1) = nan;
      out.set_missing(i, old_d + 1, true);
    }
    if (rr_ok) {
      out.features(i, old_d + 2) = 60000.0 / d.features(i, rr);
    } else {
      out.features(i, old_d + 2) = nan;
      out.set_missing(i, old_d + 2, true);
    }
  }
  return out;
}

RollingStats rolling_stats(const std::vector<double>& series, std::size_t window) {
  if (window < 1) throw ConfigError("rolling_stats: window must be >= 1");
  if (series.size() < window) throw ConfigError("rolling_stats: window exceeds series length");

  RollingStats out;
  out.window = window;
  const std::size_t count = series.size() - window + 1;
  out.means.resize(count);
  out.stds.resize(count);
  out.skews.resize(count);
  const double w = static_cast<double>(window);

  for (std::size_t i = 0; i < count; ++i) {
    double mean = 0.0;
    for (std::size_t t = 0; t < window; ++t) mean += series[i + t];
    mean /= w;
    double m2 = 0.0, m3 = 0.0;
    for (std::size_t t = 0; t < window; ++t) {
      const double diff = series[i + t] - mean;
      m2 += diff * diff;
      m3 += diff * diff * diff;
    }
    out.means[i] = mean;
    const double sample_var = window > 1 ? m2 / (w - 1.0) : 0.0;
    out.stds[i] = std::sqrt(sample_var);
    if (window < 3 || out.stds[i] == 0.0) {
      out.skews[i] = 0.0;
    } else {
      // Adjusted Fisher-Pearson coefficient.
      const double biased = (m3 / w) / std::pow(m2 / w, 1.5);
      out.skews[i] = biased * std::sqrt(w * (w - 1.0)) / (w - 2.0);
    }
  }
  return out;
}

}  // namespace cardio
