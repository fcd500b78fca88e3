#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "lcrip/ensembles.hpp"
#include "lcrip/spectra.hpp"
#include "oracles.hpp"

using namespace lcrip;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  auto eng = RngStream{seed, 0}.engine();
  std::vector<double> x(n);
  for (double& v : x) v = standard_normal(eng);
  return x;
}

double h(double z, double N) { return z * std::log(M_E * N / z); }

}  // namespace

// =============================================================================
// Rearrangement and counts
// =============================================================================

TEST(Rearrange, SmallExamples) {
  EXPECT_EQ(rearrange_desc(std::vector<double>{3, -4, 0}), (std::vector<double>{4, 3, 0}));
  EXPECT_EQ(rearrange_desc(std::vector<double>(4, 0.0)), std::vector<double>(4, 0.0));
}

TEST(Rearrange, PermutationOfMagnitudesAndIdempotent) {
  const auto x = random_vector(10, 1);
  const auto r = rearrange_desc(x);
  std::vector<double> mags;
  for (double v : x) mags.push_back(std::abs(v));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  EXPECT_EQ(r, mags);
  EXPECT_TRUE(std::is_sorted(r.begin(), r.end(), std::greater<>()));
  EXPECT_EQ(rearrange_desc(r), r);
}

TEST(OrderStatistic, MatchesRearrangement) {
  const auto x = random_vector(9, 2);
  const auto r = rearrange_desc(x);
  for (std::size_t ell = 1; ell <= 9; ++ell) EXPECT_EQ(order_statistic(x, ell), r[ell - 1]);
  EXPECT_THROW(order_statistic(x, 0), std::invalid_argument);
  EXPECT_THROW(order_statistic(x, 10), std::invalid_argument);
}

TEST(CountExceed, Examples) {
  const std::vector<double> x{1, -2, 3};
  EXPECT_EQ(count_exceed(x, 1, ExceedMode::Signed), 2U);
  EXPECT_EQ(count_exceed(x, 2, ExceedMode::Absolute), 2U);
}

TEST(CountExceed, SignedHalvesCoverAbsolute) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = random_vector(12, 100 + seed);
    std::vector<double> neg(x.size());
    std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
    std::size_t previous = x.size() + 1;
    for (double t = 0.0; t <= 3.0; t += 0.25) {
      const auto total = count_exceed(x, t, ExceedMode::Absolute);
      EXPECT_GE(count_exceed(x, t, ExceedMode::Signed) + count_exceed(neg, t, ExceedMode::Signed),
                total);
      EXPECT_LE(total, previous);
      previous = total;
    }
  }
}

// =============================================================================
// Top-m norm
// =============================================================================

TEST(TopMNorm, Examples) {
  const std::vector<double> x{3, -4, 0, 0};
  EXPECT_EQ(top_m_norm(x, 1), 4.0);
  EXPECT_DOUBLE_EQ(top_m_norm(x, 4), 5.0);
  EXPECT_THROW(top_m_norm(x, 0), std::invalid_argument);
  EXPECT_THROW(top_m_norm(x, 5), std::invalid_argument);
}

TEST(TopMNorm, MatchesSubsetEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = random_vector(10, 200 + seed);
    EXPECT_NEAR(top_m_norm(x, 4), oracle::brute_top_m(x, 4), 1e-12);
  }
}

TEST(TopMNorm, HeadAndTailPartitionNorm) {
  const auto x = random_vector(11, 3);
  double total = 0.0;
  for (double v : x) total += v * v;
  const auto r = rearrange_desc(x);
  for (std::size_t m = 1; m < x.size(); ++m) {
    double tail = 0.0;
    for (std::size_t i = m; i < r.size(); ++i) tail += r[i] * r[i];
    const double head = top_m_norm(x, m);
    EXPECT_NEAR(head * head + tail, total, 1e-12 * total);
  }
}

// =============================================================================
// Weak moments
// =============================================================================

TEST(SigmaEstimate, SecondMomentIsOne) {
  for (auto kind : {EnsembleKind::ExponentialProduct, EnsembleKind::UniformL1Ball}) {
    const double s = sigma_estimate(EnsembleSpec(kind, 4), 2.0, 40000, 8, RngStream{1, 0});
    EXPECT_NEAR(s, 1.0, 0.02) << to_string(kind);
  }
}

TEST(SigmaEstimate, GaussianFourthMoment) {
  const double s =
      sigma_estimate(EnsembleSpec(EnsembleKind::GaussianProduct, 3), 4.0, 40000, 8, RngStream{2, 0});
  EXPECT_NEAR(s, std::pow(3.0, 0.25), 0.05 * std::pow(3.0, 0.25));
}

TEST(SigmaEstimate, ExponentialSixthMomentAtLeastCoordinate) {
  const double coordinate = oracle::laplace_abs_moment(6.0);
  EXPECT_NEAR(coordinate, std::pow(90.0, 1.0 / 6.0), 1e-6);
  const double s = sigma_estimate(EnsembleSpec(EnsembleKind::ExponentialProduct, 3), 6.0, 60000,
                                  8, RngStream{3, 0});
  EXPECT_GE(s, 0.95 * coordinate);
}

TEST(SigmaEstimate, VarianceGuard) {
  const EnsembleSpec spec(EnsembleKind::GaussianProduct, 2);
  EXPECT_THROW(sigma_estimate(spec, 4.0, 3999, 4, RngStream{}), std::invalid_argument);
  EXPECT_THROW(sigma_estimate(spec, 1.5, 10000, 4, RngStream{}), std::invalid_argument);
}

TEST(SigmaModel, GenericInverseIsIdentity) {
  const auto model = SigmaModel::generic();
  EXPECT_EQ(model.inverse(7.0), 7.0);
  EXPECT_EQ(model(5.0), 5.0);
  EXPECT_THROW((void)model.inverse(0.5), std::invalid_argument);
}

TEST(SigmaModel, EmpiricalSqrtInverse) {
  std::vector<double> p, s;
  for (double q = 2.0; q <= 16.0; q += 0.5) {
    p.push_back(q);
    s.push_back(std::sqrt(q));
  }
  const auto model = SigmaModel::empirical(p, s);
  EXPECT_NEAR(model.inverse(3.0), 9.0, 1e-6);
  EXPECT_NEAR(model.inverse(2.2), 4.84, 0.02);
  for (double level = std::sqrt(2.0); level < 4.0; level += 0.1) {
    EXPECT_LE(model(model.inverse(level)), level + 1e-9);
  }
  EXPECT_THROW((void)model.inverse(1.0), std::invalid_argument);
}

TEST(SigmaModel, GrowthConditionHolds) {
  const std::vector<double> ps{2, 3, 4, 6, 8};
  const std::vector<double> ts{1, 1.5, 2, 4};
  EXPECT_EQ(SigmaModel::generic().growth_violations(ps, ts), 0U);
  std::vector<double> grid, vals;
  for (double q = 2.0; q <= 40.0; q += 1.0) {
    grid.push_back(q);
    vals.push_back(std::sqrt(q));
  }
  EXPECT_EQ(SigmaModel::empirical(grid, vals).growth_violations(ps, ts), 0U);
}

// =============================================================================
// Thresholds
// =============================================================================

TEST(M0Threshold, LargeTGivesM) {
  const auto r = m0_threshold(SigmaModel::generic(), 50.0, 10, 100);
  EXPECT_FALSE(r.empty);
  EXPECT_EQ(r.m0, 10U);
}

TEST(M0Threshold, MatchesScan) {
  const double N = 100.0;
  const double target = std::sqrt(10.0) * std::log(10.0 * M_E);
  std::size_t expected = 0;
  for (std::size_t k = 1; k <= 10; ++k) {
    if (h(static_cast<double>(k), N) <= target) expected = k;
  }
  const auto r = m0_threshold(SigmaModel::generic(), 1.0, 10, 100);
  EXPECT_EQ(r.m0, expected);
  EXPECT_EQ(r.empty, expected == 0);
}

TEST(M0Threshold, MonotoneInTAndBracketed) {
  const auto model = SigmaModel::generic();
  for (std::size_t m : {3, 10, 40}) {
    std::size_t previous = 0;
    for (double t = 1.0; t <= 6.0; t += 0.25) {
      const auto r = m0_threshold(model, t, m, 200);
      EXPECT_GE(r.m0, previous);
      previous = r.m0;
      const double bound = model.inverse(t * std::sqrt(static_cast<double>(m)) *
                                         std::log(M_E * 200.0 / static_cast<double>(m)));
      if (r.m0 >= 1) {
        EXPECT_LE(h(static_cast<double>(r.m0), 200.0), bound);
      }
      if (r.m0 >= 1 && r.m0 < m) {
        EXPECT_GT(h(static_cast<double>(r.m0 + 1), 200.0), bound);
      }
    }
  }
}

TEST(M1Threshold, AgreesWithGridScan) {
  const double root = m1_threshold(0.5, 16, 64);
  const double target = std::sqrt(16.0) / 0.5 * std::log(M_E * 64.0 / 16.0);
  double best = 0.0, best_gap = 1e9;
  for (double z = 1e-4; z <= 64.0; z += 1e-4) {
    const double gap = std::abs(h(z, 64.0) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = z;
    }
  }
  EXPECT_NEAR(root, best, 2e-4);
}

TEST(M1Threshold, FullDimensionRoot) {
  // m = N, b = 1/sqrt(N): right side sqrt(N)^2 log e = N = h(N).
  EXPECT_NEAR(m1_threshold(1.0 / std::sqrt(49.0), 49, 49), 49.0, 1e-8);
}

TEST(M1Threshold, LogRatioBound) {
  for (std::size_t N : {50, 200, 1000}) {
    for (std::size_t m : {4, 16, 49}) {
      if (m > N) continue;
      const double lo = 1.0 / std::sqrt(static_cast<double>(m));
      for (double b = lo; b <= 1.0; b += (1.0 - lo) / 7.0) {
        const double m1 = m1_threshold(b, m, N);
        EXPECT_LE(std::log(static_cast<double>(m) / m1),
                  2.0 * std::log(M_E * b * std::sqrt(static_cast<double>(m))) + 1e-9);
      }
    }
  }
}

TEST(M1Threshold, RejectsOutOfRangeWeight) {
  EXPECT_THROW(m1_threshold(0.1, 16, 64), std::invalid_argument);
  EXPECT_THROW(m1_threshold(1.5, 16, 64), std::invalid_argument);
}

TEST(OmegaCutoff, Examples) {
  EXPECT_NEAR(omega_cutoff({1.0, 9, 9, 1.0}), 3.0, 1e-12);
  EXPECT_NEAR(omega_cutoff({2.0, 1, 27, 1.0}), 2.0 * std::log(M_E * 27.0), 1e-12);
  const OmegaEvent ev{1.7, 5, 80, 2.5};
  OmegaEvent doubled = ev;
  doubled.t *= 2.0;
  EXPECT_NEAR(omega_cutoff(doubled), 2.0 * omega_cutoff(ev), 1e-12);
}
