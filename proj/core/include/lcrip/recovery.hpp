#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcrip/ensembles.hpp"
#include "lcrip/rng.hpp"
#include "lcrip/sparse_norms.hpp"
#include "lcrip/subsets.hpp"

namespace lcrip {

/// b_m = m loglog(3m) log^2(3 max{N,n} / m).
double rip_b_m(std::size_t m, std::size_t n, std::size_t N);

/// Left side of the admissibility inequality
///   m loglog(3m) log^2(3 max{N,n}/m) <= c theta^2 n / log(3/theta).
double rip_admissibility_lhs(std::size_t m, std::size_t n, std::size_t N);
double rip_admissibility_rhs(std::size_t n, double theta, double c);

struct RipAdmissibility {
  std::size_t m = 0;            ///< largest admissible m <= N, 0 if none
  double b_m = 0.0;             ///< at the reported m
  bool b_m_small = false;       ///< b_m <= c theta n
  bool sparsity_condition = false;  ///< m log(3N/m) log^2(n/b_m) <= c theta^2 n
  double B = 0.0;               ///< C1 log(n / b_m); 0 when b_m >= n
  double C1 = 1.0;
  std::string diagnostic;
};

/// Scans every m = 1..N and keeps the largest one satisfying the inequality.
RipAdmissibility rip_admissible_m(std::size_t n, std::size_t N, double theta, double c,
                                  double C1 = 1.0);

/// Monte Carlo mean of A_{k,m}^2 for every k = 1..n (entry k-1); replica r
/// is sample_matrix(spec, n, stream.child(r)).
std::vector<double> estimate_akm_mean_sq(const EnsembleSpec& spec, std::size_t n,
                                         std::size_t m, std::size_t replicas,
                                         const RngStream& stream,
                                         std::uint64_t budget = kDefaultBudget,
                                         unsigned workers = 1);

struct RipCertificate {
  std::size_t m = 0;
  double theta = 0.0;
  double B = 1.0;
  std::size_t n = 0;
  std::size_t k_star = 0;           ///< largest k <= n with k <= (A_{k,m}/B)^2; 0 if none
  double akm_value = 0.0;           ///< A_{k_star,m}
  double akm_mean_sq_estimate = 0.0;
  std::size_t replicas = 0;
  double bound = 0.0;               ///< 2 theta + 2 (akm_value^2 + mean_sq) / n
  std::optional<double> exact_delta;
  bool sound = true;                ///< bound >= exact_delta when present
  bool truncation_admissible = false;  ///< m log(11eN/m) <= 3 theta^2 n / (16 B^2)
  double probability_floor = 0.0;   ///< max{0, 1 - C(N,m) 11^m exp(-3 theta^2 n / 8B^2)}
  Method akm_method = Method::Exact;
  std::vector<double> akm_profile;  ///< A_{k,m}, k = 1..n
};

struct RipCertificateOptions {
  std::uint64_t budget = kDefaultBudget;
  /// Precomputed estimate_akm_mean_sq output; replicas are drawn otherwise.
  const std::vector<double>* cached_mean_sq = nullptr;
  std::size_t heuristic_restarts = 20;
  unsigned workers = 1;
};

/// Replicas come from the spec recorded in a's provenance.
RipCertificate rip_certificate(const SampleMatrix& a, std::size_t m, double theta, double B,
                               std::size_t replicas, const RngStream& stream,
                               const RipCertificateOptions& options = {});

/// Recomputes k_star from an A_{k,m} profile.
std::size_t certificate_k_star(std::span<const double> profile, double B);

struct BasisPursuitOptions {
  double tol = 1e-9;
  std::size_t max_iter = 20000;
  double rho = 1.0;     ///< shrinkage threshold is 1/rho
  bool polish = true;   ///< least-squares refit on the recovered support
};

struct BasisPursuitResult {
  Eigen::VectorXd x;
  double residual = 0.0;  ///< |A x - y|
  double change = 0.0;    ///< last successive-iterate difference
  std::size_t iterations = 0;
  bool converged = false;
  bool polished = false;
};

/// min ||x||_1 subject to A x = y by alternating soft thresholding with an
/// exact projection onto {A x = y} (Cholesky of A A^T, cached). A must have
/// linearly independent rows. Non-convergence is reported, not thrown.
BasisPursuitResult basis_pursuit(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                 const BasisPursuitOptions& options = {});

struct RecoveryTrial {
  std::size_t n = 0;
  std::size_t N = 0;
  std::size_t sparsity = 0;
  IndexSet support;
  Eigen::VectorXd signal;
  Eigen::VectorXd decoded;
  double residual = 0.0;
  double rel_error = 0.0;   ///< |decoded - signal| / |signal|, or |decoded| for a zero signal
  bool success = false;     ///< converged, residual <= tol and rel_error <= 1e-4
  std::string reason;
  std::size_t iterations = 0;
};

inline constexpr double kRecoveryTolerance = 1e-4;

/// A from stream.child(0); support, values and sign from stream.child(1).
RecoveryTrial recovery_trial(const EnsembleSpec& spec, std::size_t n, std::size_t N,
                             std::size_t sparsity, const RngStream& stream,
                             const BasisPursuitOptions& options = {});

struct PhaseDiagram {
  std::string ensemble;
  std::size_t n = 0;
  std::size_t N = 0;
  std::vector<std::size_t> sparsity_grid;
  std::size_t trials_per_cell = 0;
  std::vector<double> rates;
  std::vector<double> stderrs;  ///< sqrt(rate (1 - rate) / trials)
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
  RipAdmissibility admissible;  ///< reference line
  std::size_t monotone_violations = 0;  ///< rises beyond 2 standard errors
  /// First sparsity with rate < 1/2, or none.
  std::optional<std::size_t> transition;
};

/// Cell c, trial t uses stream.child(c).child(t).
PhaseDiagram phase_diagram(const EnsembleSpec& spec, std::size_t n, std::size_t N,
                           std::span<const std::size_t> sparsity_grid,
                           std::size_t trials_per_cell, const RngStream& stream,
                           double theta = 0.5, double c = 1.0,
                           const BasisPursuitOptions& options = {}, unsigned workers = 1);

}  // namespace lcrip
