#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "lcrip/ensembles.hpp"
#include "oracles.hpp"

using namespace lcrip;

namespace {
constexpr EnsembleKind kAllKinds[] = {EnsembleKind::ExponentialProduct,
                                      EnsembleKind::GaussianProduct, EnsembleKind::UniformCube,
                                      EnsembleKind::UniformL1Ball};
}

TEST(EnsembleSpec, RejectsZeroDimension) {
  EXPECT_THROW(EnsembleSpec(EnsembleKind::GaussianProduct, 0), std::invalid_argument);
}

TEST(EnsembleSpec, ParsesNamesAndAliases) {
  EXPECT_EQ(parse_ensemble_kind("ExponentialProduct"), EnsembleKind::ExponentialProduct);
  EXPECT_EQ(parse_ensemble_kind("gaussian"), EnsembleKind::GaussianProduct);
  EXPECT_EQ(parse_ensemble_kind("cube"), EnsembleKind::UniformCube);
  EXPECT_EQ(parse_ensemble_kind("UniformL1Ball"), EnsembleKind::UniformL1Ball);
  EXPECT_THROW(parse_ensemble_kind("cauchy"), std::invalid_argument);
  for (auto kind : kAllKinds) EXPECT_EQ(parse_ensemble_kind(to_string(kind)), kind);
}

// The density exp(-sqrt2 |t|)/sqrt2 has unit variance and tail exp(-sqrt2 s).
TEST(SampleVector, ExponentialCoordinateTail) {
  const EnsembleSpec spec(EnsembleKind::ExponentialProduct, 1);
  const std::size_t draws = 1'000'000;
  const double s_grid[] = {1.0, 2.0, 3.0};
  std::size_t hits[3] = {0, 0, 0};
  auto eng = RngStream{2024, 0}.engine();
  std::vector<double> x(1);
  for (std::size_t i = 0; i < draws; ++i) {
    draw_into(spec, eng, x);
    for (int j = 0; j < 3; ++j) hits[j] += std::abs(x[0]) >= s_grid[j];
  }
  for (int j = 0; j < 3; ++j) {
    const double p = std::exp(-std::sqrt(2.0) * s_grid[j]);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
    EXPECT_NEAR(static_cast<double>(hits[j]) / draws, p, 3.0 * se) << "s = " << s_grid[j];
  }
}

TEST(SampleVector, CubeCoordinatesBoundedWithUnitVariance) {
  const EnsembleSpec spec(EnsembleKind::UniformCube, 3);
  const double half = std::sqrt(3.0);
  Eigen::Vector3d second = Eigen::Vector3d::Zero();
  const int trials = 100000;
  for (int j = 0; j < trials; ++j) {
    const Eigen::VectorXd x = sample_vector(spec, RngStream{3, 0}.child(j));
    for (int i = 0; i < 3; ++i) {
      ASSERT_LE(std::abs(x(i)), half);
      second(i) += x(i) * x(i);
    }
  }
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(second(i) / trials, 1.0, 0.02);
}

TEST(SampleVector, L1BallRadiusMatchesQuadrature) {
  const double v2 = oracle::l1_ball_coordinate_variance_2d(4000);
  const double r = l1_ball_isotropy_radius(2);
  EXPECT_NEAR(r * r * v2, 1.0, 1e-3);
  EXPECT_DOUBLE_EQ(EnsembleSpec(EnsembleKind::UniformL1Ball, 2).l1_radius(), r);
}

TEST(SampleVector, L1BallDrawsStayInScaledBall) {
  const EnsembleSpec spec(EnsembleKind::UniformL1Ball, 5);
  for (int j = 0; j < 2000; ++j) {
    const Eigen::VectorXd x = sample_vector(spec, RngStream{4, 0}.child(j));
    ASSERT_LE(x.lpNorm<1>(), spec.l1_radius() * (1.0 + 1e-12));
  }
}

TEST(SampleMatrix, Deterministic) {
  const EnsembleSpec spec(EnsembleKind::GaussianProduct, 2);
  const auto a = sample_matrix(spec, 2, RngStream{77, 1});
  const auto b = sample_matrix(spec, 2, RngStream{77, 1});
  EXPECT_EQ(a.matrix(), b.matrix());
  ASSERT_TRUE(a.provenance().has_value());
  EXPECT_EQ(a.provenance()->stream, (RngStream{77, 1}));
}

TEST(SampleMatrix, SingleRowEqualsSubstreamVector) {
  for (auto kind : kAllKinds) {
    const EnsembleSpec spec(kind, 6);
    const RngStream stream{13, 2};
    const auto a = sample_matrix(spec, 1, stream);
    const Eigen::VectorXd v = sample_vector(spec, stream.child(0));
    EXPECT_EQ(Eigen::VectorXd(a.matrix().row(0).transpose()), v);
  }
}

TEST(SampleMatrix, RejectsZeroRows) {
  EXPECT_THROW(sample_matrix(EnsembleSpec(EnsembleKind::UniformCube, 2), 0, RngStream{}),
               std::invalid_argument);
}

TEST(SampleMatrix, GaussianGramNearIdentity) {
  const auto a = sample_matrix(EnsembleSpec(EnsembleKind::GaussianProduct, 4), 10000,
                               RngStream{8, 0});
  const Eigen::MatrixXd gram = a.matrix().transpose() * a.matrix() / 10000.0;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Isotropy, AllKindsWithinTolerance) {
  for (auto kind : kAllKinds) {
    const auto report = isotropy_report(EnsembleSpec(kind, 8), 100000, RngStream{31, 0});
    EXPECT_LT(report.max_abs_mean, 0.02) << to_string(kind);
    EXPECT_LT(report.max_cov_deviation, 0.03) << to_string(kind);
    EXPECT_TRUE(std::isfinite(report.psi1_estimate)) << to_string(kind);
  }
}

TEST(Isotropy, GaussianCovarianceShrinksWithTrials) {
  const EnsembleSpec spec(EnsembleKind::GaussianProduct, 4);
  const double small = isotropy_report(spec, 1000, RngStream{5, 0}).max_cov_deviation;
  const double large = isotropy_report(spec, 100000, RngStream{5, 1}).max_cov_deviation;
  EXPECT_LT(large, small);
  EXPECT_LT(large, 5.0 / std::sqrt(100000.0) * 2.0);
}

TEST(Isotropy, ExponentialPsi1NearAnalytic) {
  const double analytic = oracle::laplace_psi1();
  EXPECT_NEAR(analytic, std::sqrt(2.0), 1e-6);
  const auto report =
      isotropy_report(EnsembleSpec(EnsembleKind::ExponentialProduct, 2), 200000, RngStream{6, 0});
  EXPECT_NEAR(report.psi1_estimate, analytic, 0.1 * analytic);
}

TEST(Isotropy, RejectsTooFewTrials) {
  EXPECT_THROW(isotropy_report(EnsembleSpec(EnsembleKind::UniformCube, 2), 99, RngStream{}),
               std::invalid_argument);
}

TEST(Psi1, BoundedSamples) {
  const std::vector<double> zeros(10, 0.0);
  EXPECT_EQ(psi1_norm_estimate(zeros), 0.0);
  const std::vector<double> ones(10, 1.0);
  // exp(1/C) = 2 at C = 1/log 2.
  EXPECT_NEAR(psi1_norm_estimate(ones), 1.0 / std::log(2.0), 1e-9);
  EXPECT_THROW(psi1_norm_estimate(std::vector<double>{}), std::invalid_argument);
}
