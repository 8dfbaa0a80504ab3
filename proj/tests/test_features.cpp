#include <doctest.h>

#include <cmath>

#include "cardioforest/errors.hpp"
#include "cardioforest/features.hpp"
#include "cardioforest/rng.hpp"
#include "cardioforest/synth.hpp"

using namespace cardio;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  Matrix x(n, d);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.next_gaussian();
  }
  return x;
}

}  // namespace

TEST_CASE("standardize: hand case [1, 3]") {
  Matrix x(2, 1);
  x(0, 0) = 1.0;
  x(1, 0) = 3.0;
  const StandardizerState s = fit_standardize(x);
  CHECK(s.means[0] == doctest::Approx(2.0));
  CHECK(s.stds[0] == doctest::Approx(std::sqrt(2.0)));
  const Matrix t = apply_standardize(x, s);
  CHECK(t(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(t(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("standardize: zero mean, unit sample std on fitting data") {
  const Matrix x = random_matrix(200, 4, 11);
  const StandardizerState s = fit_standardize(x);
  const Matrix t = apply_standardize(x, s);
  for (std::size_t j = 0; j < 4; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) mean += t(i, j);
    mean /= static_cast<double>(t.rows());
    double ss = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) ss += (t(i, j) - mean) * (t(i, j) - mean);
    const double std_ = std::sqrt(ss / static_cast<double>(t.rows() - 1));
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std_ - 1.0) < 1e-9);
  }
}

TEST_CASE("standardize: constant column maps to zeros") {
  Matrix x(3, 1);
  x(0, 0) = x(1, 0) = x(2, 0) = 7.0;
  const StandardizerState s = fit_standardize(x);
  const Matrix t = apply_standardize(x, s);
  CHECK(t(0, 0) == 0.0);
  CHECK(t(1, 0) == 0.0);
  CHECK(t(2, 0) == 0.0);
}

TEST_CASE("standardize: inverse transform recovers the input") {
  const Matrix x = random_matrix(50, 3, 21);
  const StandardizerState s = fit_standardize(x);
  const Matrix t = apply_standardize(x, s);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      CHECK(std::abs(t(i, j) * s.stds[j] + s.means[j] - x(i, j)) < 1e-12);
    }
  }
}

TEST_CASE("standardize: state ignores rows outside the fitting data") {
  const Matrix x = random_matrix(100, 3, 31);
  Matrix half(50, 3);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 3; ++j) half(i, j) = x(i, j);
  }
  const StandardizerState s1 = fit_standardize(half);
  // Mutate the other half; the state of a fit on the same first half must be
  // identical.
  const StandardizerState s2 = fit_standardize(half);
  CHECK(s1.means == s2.means);
  CHECK(s1.stds == s2.stds);
}

TEST_CASE("pca: data on the line y = x has one dominant component") {
  Matrix x(100, 2);
  Rng rng(5);
  for (std::size_t i = 0; i < 100; ++i) {
    const double v = rng.next_gaussian();
    x(i, 0) = v;
    x(i, 1) = v;
  }
  const PcaState s = fit_pca(x, 2);
  CHECK(std::abs(s.components(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-9);
  CHECK(std::abs(s.components(0, 1) - 1.0 / std::sqrt(2.0)) < 1e-9);
  CHECK(s.explained_variance_ratio[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pca: full-rank projection reconstructs the input") {
  const Matrix x = random_matrix(60, 4, 17);
  const PcaState s = fit_pca(x, 4);
  const Matrix proj = apply_pca(x, s);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double rec = s.mean[j];
      for (std::size_t r = 0; r < 4; ++r) rec += proj(i, r) * s.components(r, j);
      CHECK(std::abs(rec - x(i, j)) < 1e-9);
    }
  }
}

TEST_CASE("pca: spherical data spreads variance evenly") {
  const Matrix x = random_matrix(20000, 3, 123);
  const PcaState s = fit_pca(x, 3);
  for (const double ratio : s.explained_variance_ratio) {
    CHECK(std::abs(ratio - 1.0 / 3.0) < 0.02);
  }
}

TEST_CASE("pca: components are orthonormal and ratios are sorted") {
  const Matrix x = random_matrix(300, 5, 77);
  const PcaState s = fit_pca(x, 5);
  for (std::size_t a = 0; a < 5; ++a) {
    double norm = 0.0;
    for (std::size_t j = 0; j < 5; ++j) norm += s.components(a, j) * s.components(a, j);
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-9);
    for (std::size_t b = a + 1; b < 5; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < 5; ++j) dot += s.components(a, j) * s.components(b, j);
      CHECK(std::abs(dot) < 1e-9);
    }
  }
  double total = 0.0;
  for (std::size_t r = 0; r + 1 < 5; ++r) {
    CHECK(s.explained_variance_ratio[r] >= s.explained_variance_ratio[r + 1]);
  }
  for (const double ratio : s.explained_variance_ratio) {
    CHECK(ratio >= 0.0);
    total += ratio;
  }
  CHECK(total <= 1.0 + 1e-9);
}

TEST_CASE("pca: projections of the fitting data have diagonal covariance") {
  const Matrix x = random_matrix(400, 4, 99);
  const PcaState s = fit_pca(x, 4);
  const Matrix proj = apply_pca(x, s);
  const std::size_t n = proj.rows();
  std::vector<double> mean(4, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 4; ++j) mean[j] += proj(i, j);
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      double cov = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cov += (proj(i, a) - mean[a]) * (proj(i, b) - mean[b]);
      }
      cov /= static_cast<double>(n - 1);
      CHECK(std::abs(cov) < 1e-6);
    }
  }
}

TEST_CASE("pca: k > d is a config error") {
  const Matrix x = random_matrix(10, 2, 1);
  CHECK_THROWS_AS(fit_pca(x, 3), ConfigError);
}

TEST_CASE("correlation_prune drops a duplicated column") {
  Matrix x(50, 2);
  Rng rng(8);
  for (std::size_t i = 0; i < 50; ++i) {
    x(i, 0) = rng.next_gaussian();
    x(i, 1) = x(i, 0);
  }
  CHECK(correlation_prune(x, 0.9) == std::vector<std::size_t>{0});
}

TEST_CASE("correlation_prune drops a negated column (|r| = 1)") {
  Matrix x(50, 2);
  Rng rng(9);
  for (std::size_t i = 0; i < 50; ++i) {
    x(i, 0) = rng.next_gaussian();
    x(i, 1) = -x(i, 0);
  }
  CHECK(pearson(x, 0, 1) == doctest::Approx(-1.0));
  CHECK(correlation_prune(x, 0.9) == std::vector<std::size_t>{0});
}

TEST_CASE("correlation_prune keeps weakly correlated columns") {
  const Matrix x = random_matrix(500, 4, 10);
  CHECK(correlation_prune(x, 0.9) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("correlation_prune never drops a zero-variance column") {
  Matrix x(30, 3);
  Rng rng(11);
  for (std::size_t i = 0; i < 30; ++i) {
    x(i, 0) = rng.next_gaussian();
    x(i, 1) = 5.0;
    x(i, 2) = x(i, 0);
  }
  CHECK(correlation_prune(x, 0.9) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("correlation_prune is stable under row permutation") {
  Matrix x = random_matrix(100, 5, 12);
  for (std::size_t i = 0; i < 100; ++i) x(i, 3) = x(i, 1) * 0.999 + 1e-3 * x(i, 0);
  const auto kept = correlation_prune(x, 0.95);

  std::vector<int> perm(100);
  for (int i = 0; i < 100; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng(13);
  rng.shuffle(perm);
  Matrix shuffled(100, 5);
  for (std::size_t i = 0; i < 100; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      shuffled(i, j) = x(static_cast<std::size_t>(perm[i]), j);
    }
  }
  CHECK(correlation_prune(shuffled, 0.95) == kept);
}

TEST_CASE("derived interval features: hand values") {
  SynthConfig c;
  c.n = 10;
  c.seed = 2;
  Dataset ds = generate_synthetic(c);
  std::size_t rr = 0, qrs_on = 0, qrs_end = 0, qrs_dur = 0;
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    if (ds.feature_names[j] == "rr_interval") rr = j;
    if (ds.feature_names[j] == "qrs_onset") qrs_on = j;
    if (ds.feature_names[j] == "qrs_end") qrs_end = j;
    if (ds.feature_names[j] == "qrs_duration") qrs_dur = j;
  }
  ds.features(0, rr) = 865.60;
  ds.features(0, qrs_dur) = 108.51;
  ds.features(0, qrs_on) = 283.42;
  ds.features(0, qrs_end) = 391.66;

  const Dataset out = derive_interval_features(ds);
  const std::size_t base = ds.n_cols();
  REQUIRE(out.n_cols() == base + 3);
  CHECK(out.feature_names[base] == "qrs_span");
  CHECK(out.features(0, base) == doctest::Approx(108.24));
  CHECK(std::abs(out.features(0, base) - 108.51) < 1.0);
  CHECK(out.features(0, base + 1) == doctest::Approx(108.51 / 865.60));
  CHECK(out.features(0, base + 2) == doctest::Approx(60000.0 / 865.60));

  // Existing columns are untouched.
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (std::size_t j = 0; j < base; ++j) {
      CHECK(out.features(i, j) == ds.features(i, j));
    }
  }
}

TEST_CASE("derived features: rr_interval <= 0 yields missing ratio and rate") {
  SynthConfig c;
  c.n = 3;
  c.seed = 3;
  Dataset ds = generate_synthetic(c);
  std::size_t rr = 0;
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    if (ds.feature_names[j] == "rr_interval") rr = j;
  }
  ds.features(1, rr) = 0.0;
  const Dataset out = derive_interval_features(ds);
  const std::size_t base = ds.n_cols();
  CHECK(out.is_missing(1, base + 1));
  CHECK(out.is_missing(1, base + 2));
  CHECK(!out.is_missing(0, base + 1));
}

TEST_CASE("rolling stats: constant series") {
  const RollingStats rs = rolling_stats({4.0, 4.0, 4.0, 4.0, 4.0}, 3);
  REQUIRE(rs.means.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rs.means[i] == 4.0);
    CHECK(rs.stds[i] == 0.0);
    CHECK(rs.skews[i] == 0.0);
  }
}

TEST_CASE("rolling stats: window of one mirrors the series") {
  const std::vector<double> series = {1.0, 5.0, 2.0};
  const RollingStats rs = rolling_stats(series, 1);
  CHECK(rs.means == series);
  for (const double s : rs.stds) CHECK(s == 0.0);
}

TEST_CASE("rolling stats: [1,2,3] window 3") {
  const RollingStats rs = rolling_stats({1.0, 2.0, 3.0}, 3);
  REQUIRE(rs.means.size() == 1);
  CHECK(rs.means[0] == doctest::Approx(2.0));
  CHECK(rs.stds[0] == doctest::Approx(1.0));
  CHECK(rs.skews[0] == doctest::Approx(0.0));
}

TEST_CASE("rolling stats: window larger than series is a config error") {
  CHECK_THROWS_AS(rolling_stats({1.0, 2.0}, 3), ConfigError);
}
