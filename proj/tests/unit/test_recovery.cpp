#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "lcrip/recovery.hpp"
#include "oracles.hpp"

using namespace lcrip;

// =============================================================================
// Admissibility scan
// =============================================================================

TEST(RipAdmissible, HugeConstantAdmitsEveryColumn) {
  const auto r = rip_admissible_m(64, 128, 0.99, 1e9);
  EXPECT_EQ(r.m, 128U);
}

TEST(RipAdmissible, LargestAdmissibleByDirectScan) {
  const std::size_t n = 1024, N = 4096;
  const auto r = rip_admissible_m(n, N, 0.5, 1.0);
  const double rhs = 1.0 * 0.25 * n / std::log(6.0);
  EXPECT_NEAR(rip_admissibility_rhs(n, 0.5, 1.0), rhs, 1e-12 * rhs);
  ASSERT_GE(r.m, 1U);
  const auto lhs = [&](double m) {
    return m * std::log(std::log(3 * m)) * std::pow(std::log(3.0 * N / m), 2);
  };
  EXPECT_LE(lhs(static_cast<double>(r.m)), rhs);
  for (std::size_t m = r.m + 1; m <= N; ++m) ASSERT_GT(lhs(static_cast<double>(m)), rhs) << m;
  EXPECT_NEAR(r.b_m, lhs(static_cast<double>(r.m)), 1e-9 * r.b_m);
  EXPECT_NEAR(r.B, std::log(n / r.b_m), 1e-12);
}

TEST(RipAdmissible, MonotoneInRowsAndConstant) {
  std::size_t previous = 0;
  for (std::size_t n : {256, 512, 1024, 2048, 4096}) {
    const auto r = rip_admissible_m(n, 8192, 0.5, 1.0);
    EXPECT_GE(r.m, previous);
    previous = r.m;
  }
  previous = 0;
  for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto r = rip_admissible_m(2048, 8192, 0.5, c);
    EXPECT_GE(r.m, previous);
    previous = r.m;
  }
}

TEST(RipAdmissible, NonincreasingInColumnsBelowCap) {
  // Only where the m <= N cap does not bind: there b_m grows with N.
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (std::size_t N : {2048, 4096, 8192, 16384}) {
    const auto r = rip_admissible_m(1024, N, 0.5, 1.0);
    ASSERT_LT(r.m, N);
    EXPECT_LE(r.m, previous);
    previous = r.m;
  }
}

TEST(RipAdmissible, NoneAdmissible) {
  const auto r = rip_admissible_m(4, 1000, 0.1, 0.01);
  EXPECT_EQ(r.m, 0U);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(RipAdmissible, InputErrors) {
  EXPECT_THROW(rip_admissible_m(10, 10, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(rip_admissible_m(10, 10, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(rip_admissible_m(0, 10, 0.5, 1.0), std::invalid_argument);
}

// =============================================================================
// Certificate
// =============================================================================

TEST(RipCertificate, ScaledOrthonormalRows) {
  const std::size_t n = 6;
  const SampleMatrix a(std::sqrt(static_cast<double>(n)) * Eigen::MatrixXd::Identity(6, 6));
  const std::vector<double> mean(n, 0.0);
  RipCertificateOptions opts;
  opts.cached_mean_sq = &mean;
  const auto cert = rip_certificate(a, 2, 0.25, 1.0, 0, RngStream{}, opts);
  ASSERT_TRUE(cert.exact_delta.has_value());
  EXPECT_NEAR(*cert.exact_delta, 0.0, 1e-12);
  EXPECT_TRUE(cert.sound);
  EXPECT_GE(cert.bound, 0.5);
}

TEST(RipCertificate, FieldsRecompute) {
  const EnsembleSpec spec(EnsembleKind::ExponentialProduct, 10);
  const auto a = sample_matrix(spec, 8, RngStream{21, 0});
  const auto cert = rip_certificate(a, 2, 0.5, 1.0, 10, RngStream{21, 1});
  EXPECT_EQ(cert.k_star, certificate_k_star(cert.akm_profile, 1.0));
  for (std::size_t k = 1; k <= cert.n; ++k) {
    const double ratio = cert.akm_profile[k - 1] / cert.B;
    if (k <= cert.k_star) continue;
    if (static_cast<double>(k) <= ratio * ratio) ADD_FAILURE() << "k_star is not the largest";
  }
  if (cert.k_star > 0) {
    EXPECT_LE(static_cast<double>(cert.k_star), std::pow(cert.akm_value / cert.B, 2));
    const auto mean = estimate_akm_mean_sq(spec, 8, 2, 10, RngStream{21, 1});
    EXPECT_EQ(cert.akm_mean_sq_estimate, mean[cert.k_star - 1]);
  }
  const double expected =
      2 * 0.5 + 2 * (cert.akm_value * cert.akm_value + cert.akm_mean_sq_estimate) / 8.0;
  EXPECT_DOUBLE_EQ(cert.bound, expected);
  ASSERT_TRUE(cert.exact_delta.has_value());
  EXPECT_NEAR(*cert.exact_delta, oracle::brute_delta_m(a.matrix(), 2), 1e-10);
  EXPECT_EQ(cert.sound, cert.bound >= *cert.exact_delta);
  EXPECT_GE(cert.probability_floor, 0.0);
  EXPECT_LE(cert.probability_floor, 1.0);
}

TEST(RipCertificate, KStarExamples) {
  const std::vector<double> profile{1.5, 1.6, 2.0, 1.9};
  EXPECT_EQ(certificate_k_star(profile, 1.0), 3U);  // 4 > 1.9^2, 3 <= 2.0^2
  const std::vector<double> small{0.5, 0.6};
  EXPECT_EQ(certificate_k_star(small, 1.0), 0U);
}

TEST(RipCertificate, NeedsMeanSource) {
  const SampleMatrix bare(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_THROW(rip_certificate(bare, 1, 0.5, 1.0, 0, RngStream{}), std::invalid_argument);
  EXPECT_THROW(rip_certificate(bare, 1, 0.5, 1.0, 5, RngStream{}), std::invalid_argument);
}

// =============================================================================
// Basis pursuit
// =============================================================================

TEST(BasisPursuit, IdentityReturnsMeasurement) {
  Eigen::VectorXd y(4);
  y << 1, -2, 0, 0.5;
  const auto r = basis_pursuit(Eigen::MatrixXd::Identity(4, 4), y);
  ASSERT_TRUE(r.converged);
  EXPECT_LE((r.x - y).norm(), 1e-9);
}

TEST(BasisPursuit, MatchesVertexEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = sample_matrix(EnsembleSpec(EnsembleKind::GaussianProduct, 3), 2, RngStream{seed, 9});
    const Eigen::VectorXd y = a.matrix().col(0) * 0.7;
    const auto r = basis_pursuit(a.matrix(), y);
    const auto lp = oracle::l1_min_by_supports(a.matrix(), y);
    ASSERT_TRUE(r.converged);
    ASSERT_TRUE(lp.feasible);
    EXPECT_NEAR(r.x.lpNorm<1>(), lp.l1, 1e-6) << "seed " << seed;
  }
}

TEST(BasisPursuit, FeasibleAndNoWorseThanPlantedSignal) {
  const auto a = sample_matrix(EnsembleSpec(EnsembleKind::UniformCube, 40), 20, RngStream{3, 0});
  auto eng = RngStream{3, 1}.engine();
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(40);
  for (int i = 0; i < 8; ++i) x0(static_cast<Eigen::Index>(uniform_index(eng, 40))) = standard_normal(eng);
  const Eigen::VectorXd y = a.matrix() * x0;
  const BasisPursuitOptions opts;
  const auto r = basis_pursuit(a.matrix(), y, opts);
  ASSERT_TRUE(r.converged);
  EXPECT_LE((a.matrix() * r.x - y).norm(), 10 * opts.tol * std::max(1.0, y.norm()));
  EXPECT_LE(r.x.lpNorm<1>(), x0.lpNorm<1>() + 10 * opts.tol * std::max(1.0, x0.lpNorm<1>()));
}

TEST(BasisPursuit, IterationCapReported) {
  const auto a = sample_matrix(EnsembleSpec(EnsembleKind::GaussianProduct, 30), 10, RngStream{4, 0});
  BasisPursuitOptions opts;
  opts.max_iter = 3;
  const auto r = basis_pursuit(a.matrix(), a.matrix().col(0) + a.matrix().col(5), opts);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3U);
}

TEST(BasisPursuit, InputErrors) {
  Eigen::MatrixXd dependent(2, 3);
  dependent << 1, 2, 3, 2, 4, 6;
  EXPECT_THROW(basis_pursuit(dependent, Eigen::Vector2d(1, 2)), std::invalid_argument);
  EXPECT_THROW(basis_pursuit(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector3d(1, 2, 3)),
               std::invalid_argument);
}

// =============================================================================
// Trials and phase diagram
// =============================================================================

TEST(RecoveryTrial, SparseGaussianSucceeds) {
  const EnsembleSpec spec(EnsembleKind::GaussianProduct, 128);
  const auto t = recovery_trial(spec, 64, 128, 5, RngStream{12, 0});
  EXPECT_TRUE(t.success) << t.reason;
  EXPECT_EQ(t.support.size(), 5U);
  EXPECT_LE(t.rel_error, kRecoveryTolerance);
}

TEST(RecoveryTrial, ZeroSignal) {
  const auto t = recovery_trial(EnsembleSpec(EnsembleKind::ExponentialProduct, 20), 10, 20, 0,
                                RngStream{13, 0});
  EXPECT_TRUE(t.success);
  EXPECT_LE(t.decoded.norm(), 1e-9);
}

TEST(RecoveryTrial, Deterministic) {
  const EnsembleSpec spec(EnsembleKind::ExponentialProduct, 40);
  const auto a = recovery_trial(spec, 20, 40, 4, RngStream{14, 2});
  const auto b = recovery_trial(spec, 20, 40, 4, RngStream{14, 2});
  EXPECT_EQ(a.signal, b.signal);
  EXPECT_EQ(a.decoded, b.decoded);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(RecoveryTrial, ShapeErrors) {
  const EnsembleSpec spec(EnsembleKind::GaussianProduct, 20);
  EXPECT_THROW(recovery_trial(spec, 10, 30, 2, RngStream{}), std::invalid_argument);
  EXPECT_THROW(recovery_trial(spec, 10, 20, 6, RngStream{}), std::invalid_argument);
}

TEST(PhaseDiagram, RatesFallWithSparsity) {
  const std::vector<std::size_t> grid{0, 2, 6, 12, 20};
  const auto d = phase_diagram(EnsembleSpec(EnsembleKind::GaussianProduct, 80), 40, 80, grid, 20,
                               RngStream{15, 0});
  ASSERT_EQ(d.rates.size(), grid.size());
  EXPECT_EQ(d.rates[0], 1.0);
  EXPECT_EQ(d.monotone_violations, 0U);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    EXPECT_NEAR(d.stderrs[c], std::sqrt(d.rates[c] * (1 - d.rates[c]) / 20.0), 1e-15);
  }
  if (d.transition) {
    EXPECT_LT(d.rates[std::find(grid.begin(), grid.end(), *d.transition) - grid.begin()], 0.5);
  }
}
