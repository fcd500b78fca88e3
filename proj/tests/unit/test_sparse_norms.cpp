#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "lcrip/ensembles.hpp"
#include "lcrip/errors.hpp"
#include "lcrip/operator_norm.hpp"
#include "lcrip/sparse_norms.hpp"
#include "oracles.hpp"

using namespace lcrip;

namespace {

Eigen::MatrixXd gaussian(std::size_t n, std::size_t N, std::uint64_t seed) {
  return sample_matrix(EnsembleSpec(EnsembleKind::GaussianProduct, N), n, RngStream{seed, 0})
      .matrix();
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const IndexSet& rows, const IndexSet& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          a(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    }
  }
  return out;
}

// Scaled orthonormal columns: sqrt(n) Q with Q^T Q = Id.
Eigen::MatrixXd scaled_orthonormal(std::size_t n, std::size_t N) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, N, 999));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(
                                                     static_cast<Eigen::Index>(n),
                                                     static_cast<Eigen::Index>(N));
  return std::sqrt(static_cast<double>(n)) * q;
}

double lambda_km_reference(double k, double m, double n, double N) {
  const double big = std::max(N, n);
  return std::sqrt(std::log(std::log(3.0 * m))) * std::sqrt(m) * std::log(M_E * big / m) +
         std::sqrt(k) * std::log(M_E * n / k);
}

}  // namespace

// =============================================================================
// A_{k,m}
// =============================================================================

TEST(AkmExact, IdentityGivesOne) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
  for (std::size_t k = 1; k <= 5; ++k) {
    for (std::size_t m = 1; m <= 5; ++m) EXPECT_NEAR(akm_exact(id, k, m).value, 1.0, 1e-12);
  }
}

TEST(AkmExact, FullSizeIsOperatorNorm) {
  const auto a = gaussian(4, 5, 1);
  EXPECT_NEAR(akm_exact(a, 4, 5).value, oracle::svd_norm(a), 1e-10);
  EXPECT_NEAR(akm_exact(a, 1, 1).value, a.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AkmExact, MatchesBruteForce) {
  const auto a = gaussian(5, 6, 2);
  const auto r = akm_exact(a, 2, 3);
  EXPECT_NEAR(r.value, oracle::brute_akm(a, 2, 3), 1e-10);
  EXPECT_EQ(r.rows.size(), 2U);
  EXPECT_EQ(r.cols.size(), 3U);
  EXPECT_NEAR(oracle::svd_norm(submatrix(a, r.rows, r.cols)), r.value, 1e-9 * r.value);
  EXPECT_EQ(r.evaluations, 10U * 20U);
  EXPECT_EQ(r.method, Method::Exact);
}

TEST(AkmExact, TransposeDualityAndMonotonicity) {
  const auto a = gaussian(4, 5, 3);
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::size_t m = 1; m <= 5; ++m) {
      const double v = akm_exact(a, k, m).value;
      EXPECT_NEAR(v, akm_exact(a.transpose(), m, k).value, 1e-9);
      if (k > 1) {
        EXPECT_GE(v + 1e-12, akm_exact(a, k - 1, m).value);
      }
      if (m > 1) {
        EXPECT_GE(v + 1e-12, akm_exact(a, k, m - 1).value);
      }
    }
  }
}

TEST(AkmExact, TiesGoToLexicographicallySmallest) {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
  const auto r = akm_exact(ones, 2, 2);
  EXPECT_EQ(r.rows, (IndexSet{0, 1}));
  EXPECT_EQ(r.cols, (IndexSet{0, 1}));
}

TEST(AkmExact, WorkerCountDoesNotChangeResult) {
  const auto a = gaussian(7, 8, 4);
  const auto serial = akm_exact(a, 3, 3, kDefaultBudget, 1);
  const auto threaded = akm_exact(a, 3, 3, kDefaultBudget, 4);
  EXPECT_EQ(serial.value, threaded.value);
  EXPECT_EQ(serial.rows, threaded.rows);
  EXPECT_EQ(serial.cols, threaded.cols);
}

TEST(AkmExact, BudgetAndRangeErrors) {
  const auto a = gaussian(6, 6, 5);
  EXPECT_THROW(akm_exact(a, 3, 3, 399), BudgetExceeded);
  EXPECT_NO_THROW(akm_exact(a, 3, 3, 400));
  EXPECT_THROW(akm_exact(a, 0, 1), std::invalid_argument);
  EXPECT_THROW(akm_exact(a, 1, 7), std::invalid_argument);
}

TEST(AkmLower, IdentityAndSoundness) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  EXPECT_NEAR(akm_lower(id, 2, 3, 1, RngStream{1, 0}).value, 1.0, 1e-12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = gaussian(5, 6, 50 + seed);
    const auto r = akm_lower(a, 2, 3, 5, RngStream{seed, 1});
    EXPECT_LE(r.value, akm_exact(a, 2, 3).value + 1e-12);
    EXPECT_EQ(r.method, Method::Heuristic);
    EXPECT_NEAR(oracle::svd_norm(submatrix(a, r.rows, r.cols)), r.value, 1e-9 * r.value);
  }
}

TEST(AkmLower, MatchesExactOnMostInstances) {
  int hits = 0;
  for (std::uint64_t j = 0; j < 100; ++j) {
    const auto a = sample_matrix(EnsembleSpec(EnsembleKind::GaussianProduct, 6), 5,
                                 RngStream{700, 0}.child(j)).matrix();
    const double exact = akm_exact(a, 2, 3).value;
    const double lower = akm_lower(a, 2, 3, 50, RngStream{700, 1}.child(j)).value;
    hits += std::abs(exact - lower) <= 1e-9 * exact;
  }
  EXPECT_GE(hits, 95);
}

TEST(AkmLower, MonotoneInRestarts) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = gaussian(8, 10, 80 + seed);
    const RngStream stream{seed, 9};
    EXPECT_GE(akm_lower(a, 3, 3, 8, stream).value, akm_lower(a, 3, 3, 4, stream).value);
  }
}

TEST(AkmProfile, MatchesPerKExact) {
  for (std::size_t m : {1, 2, 3}) {
    const auto a = gaussian(6, 7, 10 + m);
    const auto profile = akm_profile(a, m);
    ASSERT_EQ(profile.size(), 6U);
    for (std::size_t k = 1; k <= 6; ++k) {
      EXPECT_NEAR(profile[k - 1].value, oracle::brute_akm(a, k, m), 1e-9) << "k=" << k << " m=" << m;
    }
  }
}

// =============================================================================
// delta_m
// =============================================================================

TEST(DeltaExact, ScaledOrthonormalIsZero) {
  const auto a = scaled_orthonormal(8, 5);
  for (std::size_t m = 1; m <= 5; ++m) EXPECT_NEAR(delta_m_exact(a, m).delta, 0.0, 1e-12);
}

TEST(DeltaExact, IdentityTwo) {
  EXPECT_NEAR(delta_m_exact(Eigen::MatrixXd::Identity(2, 2), 1).delta, 0.5, 1e-15);
}

TEST(DeltaExact, FullSetIsGramDeviation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = gaussian(3 + seed, 2 + seed % 5, 20 + seed);
    const auto n = static_cast<std::size_t>(a.cols());
    EXPECT_NEAR(delta_m_exact(a, n).delta, oracle::gram_deviation(a), 1e-10);
  }
}

TEST(DeltaExact, MatchesBruteForceAndIsMonotone) {
  const auto a = gaussian(6, 7, 30);
  double previous = 0.0;
  for (std::size_t m = 1; m <= 7; ++m) {
    const auto r = delta_m_exact(a, m);
    EXPECT_NEAR(r.delta, oracle::brute_delta_m(a, m), 1e-10);
    EXPECT_GE(r.delta + 1e-12, previous);
    previous = r.delta;
    // The reported subset reproduces the value.
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(m));
    for (std::size_t c = 0; c < m; ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(static_cast<Eigen::Index>(r.cols[c]));
    EXPECT_NEAR(oracle::gram_deviation(sub), r.delta, 1e-10);
  }
}

TEST(DeltaExact, BudgetError) {
  EXPECT_THROW(delta_m_exact(gaussian(4, 10, 1), 3, 119), BudgetExceeded);
}

TEST(DeltaLower, ScaledOrthonormalIsZero) {
  const auto a = scaled_orthonormal(9, 6);
  EXPECT_NEAR(delta_m_lower(a, 3, 5, RngStream{1, 1}).delta, 0.0, 1e-12);
}

TEST(DeltaLower, MatchesExactOnMostInstances) {
  int hits = 0;
  for (std::uint64_t j = 0; j < 100; ++j) {
    const auto a = sample_matrix(EnsembleSpec(EnsembleKind::GaussianProduct, 10), 6,
                                 RngStream{800, 0}.child(j)).matrix();
    const double exact = delta_m_exact(a, 3).delta;
    const auto lower = delta_m_lower(a, 3, 50, RngStream{800, 1}.child(j));
    EXPECT_LE(lower.delta, exact + 1e-12);
    hits += std::abs(exact - lower.delta) <= 1e-9 * exact;
  }
  EXPECT_GE(hits, 90);
}

TEST(DeltaLower, PathIsNondecreasing) {
  const auto a = gaussian(10, 14, 40);
  const auto path = delta_m_lower_path(a, 8, 3, RngStream{40, 1});
  ASSERT_EQ(path.size(), 8U);
  for (std::size_t i = 1; i < path.size(); ++i) EXPECT_GE(path[i].delta, path[i - 1].delta);
}

// =============================================================================
// Threshold formulas
// =============================================================================

TEST(KPrime, Examples) {
  EXPECT_EQ(k_prime(1, 30, 30), std::optional<std::size_t>(1));
  const std::size_t n = 20;
  std::optional<std::size_t> expected;
  for (std::size_t k = 1; k <= n; ++k) {
    const double dk = static_cast<double>(k);
    if (dk * std::log(M_E * 20.0 / dk) >= 20.0) {
      expected = k;
      break;
    }
  }
  EXPECT_EQ(k_prime(20, 20, 20), expected);
  // n = 2: max_k k log(2e/k) < m log(eN/m) for m = N = 50.
  EXPECT_LT(std::max(std::log(2.0 * M_E), 2.0 * std::log(M_E)), 50.0);
  EXPECT_FALSE(k_prime(50, 2, 50).has_value());
}

TEST(Lambda, FullDimensionClosedForm) {
  const double N = 12.0;
  EXPECT_NEAR(lambda_km(12, 12, 12, 12),
              std::sqrt(N) * (std::sqrt(std::log(std::log(3.0 * N))) + 1.0), 1e-12);
}

TEST(Lambda, MatchesReference) {
  EXPECT_NEAR(lambda_km(1, 1, 10, 10), lambda_km_reference(1, 1, 10, 10), 1e-12);
  EXPECT_NEAR(lambda_km(3, 5, 20, 40), lambda_km_reference(3, 5, 20, 40), 1e-12);
  for (std::size_t k = 1; k <= 20; ++k) EXPECT_LE(lambda_m(5, 20, 40), lambda_km(k, 5, 20, 40));
}

TEST(GFunction, BranchesAndJump) {
  const double m = 16.0, N = 64.0;
  const double L = std::log(M_E * N / m);
  EXPECT_NEAR(g_function(4.0, 16, 64), std::sqrt(4.0 * m) / std::sqrt(std::log(M_E * M_E * m / 4.0)) * L,
              1e-12);
  const double below = g_function(m - 1e-9, 16, 64);
  const double above = g_function(m + 1e-9, 16, 64);
  EXPECT_NEAR(below, m * L / std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(above, m * L, 1e-6);
  EXPECT_NEAR(above / below, std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(g_function(m, 16, 64), m * L, 1e-12);
  EXPECT_LT(g_function(1e-12, 16, 64), 1e-4);
  EXPECT_NEAR(g_function(1e6, 16, 64), m * L * L, 1e-9);
}

// =============================================================================
// Split inequality and nets
// =============================================================================

TEST(SplitInequality, HoldsOnRandomFamilies) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 9;
    const auto family = gaussian(n, 1 + seed % 6, 300 + seed);
    const auto check = split_inequality(family);
    const Eigen::MatrixXd gram = family * family.transpose();
    EXPECT_NEAR(check.off_diagonal, gram.sum() - gram.trace(), 1e-9 * (1.0 + gram.cwiseAbs().sum()));
    EXPECT_TRUE(check.holds());
  }
}

TEST(SplitInequality, RejectsLargeFamilies) {
  EXPECT_THROW(split_inequality(Eigen::MatrixXd::Zero(31, 2)), std::invalid_argument);
}

TEST(EpsilonNet, OneSparseIsSignedBasis) {
  const auto net = epsilon_net_sparse_sphere(5, 1, 0.3);
  EXPECT_EQ(net.size(), 10U);
  for (const auto& v : net) {
    EXPECT_NEAR(v.norm(), 1.0, 1e-15);
    EXPECT_EQ((v.array() != 0.0).count(), 1);
  }
}

TEST(EpsilonNet, CoversTwoSparseSphere) {
  const double eps = 0.2;
  const auto net = epsilon_net_sparse_sphere(4, 2, eps);
  EXPECT_LE(static_cast<double>(net.size()), 6.0 * std::pow(1.0 + 2.0 / eps, 2));
  auto eng = RngStream{17, 0}.engine();
  int misses = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const auto i = uniform_index(eng, 4);
    auto j = uniform_index(eng, 3);
    if (j >= i) ++j;
    Eigen::Vector4d x = Eigen::Vector4d::Zero();
    x(static_cast<Eigen::Index>(i)) = standard_normal(eng);
    x(static_cast<Eigen::Index>(j)) = standard_normal(eng);
    x.normalize();
    double best = 1e9;
    for (const auto& v : net) best = std::min(best, (x - v).norm());
    misses += best > eps;
  }
  EXPECT_EQ(misses, 0);
}

TEST(EpsilonNet, CapExceeded) {
  EXPECT_THROW(epsilon_net_sparse_sphere(40, 4, 0.1, 1e5), BudgetExceeded);
}
