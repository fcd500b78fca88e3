#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lcrip/rng.hpp"
#include "lcrip/subsets.hpp"

namespace lcrip {

enum class Method { Exact, Heuristic };

/// Value of A_{k,m} = max over |J| = k, |I| = m of ||A(J, I)||.
struct SubmatrixResult {
  double value = 0.0;
  IndexSet rows;  ///< J, sorted
  IndexSet cols;  ///< I, sorted
  Method method = Method::Exact;
  std::uint64_t evaluations = 0;
};

enum class Extreme { TopEigen, BottomEigen };

/// delta_m(A / sqrt(n)) = max over |I| = m of the largest deviation of the
/// spectrum of (1/n) A_I^T A_I from 1.
struct RipResult {
  double delta = 0.0;
  IndexSet cols;
  Extreme extreme = Extreme::TopEigen;
  Method method = Method::Exact;
  std::uint64_t evaluations = 0;
};

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

/// Exact A_{k,m} by enumerating all C(n,k) C(N,m) pairs (J, I). Ties go
/// to the lexicographically smallest (J, I). Throws BudgetExceeded when
/// the pair count exceeds `budget`.
SubmatrixResult akm_exact(const Eigen::MatrixXd& a, std::size_t k, std::size_t m,
                          std::uint64_t budget = kDefaultBudget, unsigned workers = 1);

/// Lower bound on A_{k,m} by alternating maximization from random starts.
/// Restart r is seeded from stream.child(r), so more restarts never lower
/// the result.
SubmatrixResult akm_lower(const Eigen::MatrixXd& a, std::size_t k, std::size_t m,
                          std::size_t restarts, const RngStream& stream);

/// Exact A_{k,m} for every k = 1..n (entry k-1). For m = 1 and m = 2 this
/// uses closed forms (sorted column entries, resp. an angular sweep over
/// the row arrangement of each column pair) and costs C(N, m) sweeps;
/// otherwise it enumerates and charges sum_k C(n,k) C(N,m) to `budget`.
std::vector<SubmatrixResult> akm_profile(const Eigen::MatrixXd& a, std::size_t m,
                                         std::uint64_t budget = kDefaultBudget,
                                         unsigned workers = 1);

/// Exact delta_m(A / sqrt(n)) over all C(N, m) column subsets.
RipResult delta_m_exact(const Eigen::MatrixXd& a, std::size_t m,
                        std::uint64_t budget = kDefaultBudget, unsigned workers = 1);

/// Greedy construction plus best-improvement swaps; a lower bound on
/// delta_m. When `seed` is given, restart 0 starts from it (extended
/// greedily if shorter than m).
RipResult delta_m_lower(const Eigen::MatrixXd& a, std::size_t m, std::size_t restarts,
                        const RngStream& stream, const IndexSet* seed = nullptr);

/// delta_m_lower for m = 1..m_max, each search seeded with the previous
/// argmax, so the reported values are nondecreasing in m.
std::vector<RipResult> delta_m_lower_path(const Eigen::MatrixXd& a, std::size_t m_max,
                                          std::size_t restarts, const RngStream& stream);

/// Deviation max(lambda_max - 1, 1 - lambda_min) of a symmetric matrix.
double spectral_deviation(const Eigen::MatrixXd& gram, Extreme* which = nullptr);

/// Smallest k <= n with k log(en/k) >= m log(eN/m), if any.
std::optional<std::size_t> k_prime(std::size_t m, std::size_t n, std::size_t N);

/// sqrt(loglog 3m) sqrt(m) log(e max{N,n}/m) + sqrt(k) log(en/k).
double lambda_km(std::size_t k, std::size_t m, std::size_t n, std::size_t N);

/// sqrt(loglog 3m) sqrt(m) / sqrt(log 3m) * log(e max{N,n}/m).
double lambda_m(std::size_t m, std::size_t n, std::size_t N);

/// Block-size weight g(z). For z < m:
///   sqrt(z m) / sqrt(log(e^2 m / z)) * log(eN/m),
/// for z >= m:
///   min{sqrt(z m) log(eN/m), m log^2(eN/m)}.
/// The branches differ by a factor sqrt(2) at z = m.
double g_function(double z, std::size_t m, std::size_t N);

struct SplitCheck {
  double off_diagonal = 0.0;  ///< sum over i != j of <x_i, x_j>
  double best_cut = 0.0;      ///< max over E of sum_{i in E, j notin E} <x_i, x_j>
  std::uint64_t best_mask = 0;
  [[nodiscard]] bool holds(double slack = 1e-12) const {
    return off_diagonal <= 4.0 * best_cut + slack * (1.0 + std::abs(off_diagonal));
  }
};

/// Exhaustive check of sum_{i != j} <x_i, x_j> <= 4 max_E cut(E) over all
/// 2^n subsets E (Gray-code order). Rows of `family` are x_1..x_n; n <= 30.
SplitCheck split_inequality(const Eigen::MatrixXd& family);

/// Union over all m-supports of an eps-net of the unit sphere of that
/// support; every m-sparse unit vector lies within eps of a point with the
/// same support. Throws BudgetExceeded when C(N,m) (1 + 2/eps)^m > cap.
std::vector<Eigen::VectorXd> epsilon_net_sparse_sphere(std::size_t N, std::size_t m,
                                                       double eps,
                                                       double cap = 1e7);

/// The per-support template: an eps-net of S^{m-1} (columns are points).
Eigen::MatrixXd sphere_net(std::size_t m, double eps);

}  // namespace lcrip
