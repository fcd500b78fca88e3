#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lcrip/ensembles.hpp"
#include "lcrip/rng.hpp"
#include "lcrip/sparse_norms.hpp"
#include "lcrip/spectra.hpp"

namespace lcrip {

/// Empirical t -> P(S >= t) on a sorted grid.
struct SurvivalCurve {
  std::string statistic_id;
  std::vector<double> thresholds;
  std::vector<double> survival;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Closed-event survival P(S >= t). Throws on empty input or unsorted grid.
SurvivalCurve survival_curve(std::span<const double> samples,
                             std::span<const double> thresholds,
                             std::string statistic_id = {}, std::uint64_t seed = 0);

/// `count` log-spaced points in [lo, hi].
std::vector<double> log_spaced_grid(double lo = 1.0, double hi = 8.0, std::size_t count = 12);

/// Empirical q-quantile: the ceil(q T)-th smallest sample.
double empirical_quantile(std::span<const double> samples, double q);

struct CalibrationReport {
  std::string bound_id;
  double fitted_C = 0.0;                 ///< max over the grid of per_threshold_C
  std::vector<double> per_threshold_C;   ///< smallest admissible constant per grid point
  std::vector<bool> used;                ///< grid points that entered the fit
  double slope = std::numeric_limits<double>::quiet_NaN();  ///< d log P / dt in the tail
  std::size_t convexity_violations = 0;
  bool pass = false;                     ///< fitted_C finite
};

/// Fit of a family P(S >= C a(t)) <= b(t): with q = floor(b(t) T) allowed
/// exceedances, the infimum of admissible C at t is s_(q+1) / a(t), where
/// s_(j) is the j-th largest sample (0 when q >= T).
CalibrationReport fit_scaled_bound(std::string bound_id, std::span<const double> samples,
                                   std::span<const double> scale,
                                   std::span<const double> allowed,
                                   const std::vector<bool>& use = {});

/// Fit of a family whose constant sits inside the exponent: the caller maps
/// (grid index, L = -log P(S >= t)) to the smallest constant, with L = +inf
/// when no sample reaches t.
CalibrationReport fit_exponent_bound(
    std::string bound_id, const SurvivalCurve& curve,
    const std::function<double(std::size_t, double)>& constant_for,
    const std::vector<bool>& use = {});

/// Least-squares slope of log P(S >= t) against t on `points` thresholds
/// from `t_from` up to the level that still has `min_exceed` exceedances.
double log_survival_slope(std::span<const double> samples, double t_from,
                          std::size_t min_exceed = 20, std::size_t points = 16);

/// Grid points where log-survival bends downward (negative second divided
/// difference); a shape diagnostic only.
std::size_t convexity_violations(const SurvivalCurve& curve);

struct TailReport {
  std::string check_id;
  SurvivalCurve curve;
  CalibrationReport calibration;          ///< primary bound
  std::vector<CalibrationReport> extra;   ///< variants of the primary bound
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<double> statistic;          ///< per-trial values, trial order
  bool lower_bound_statistic = false;     ///< statistic is a heuristic lower bound

  [[nodiscard]] double diagnostic(const std::string& name) const;
};

/// Trial j of every check draws from stream.child(j): a vector X uses row 0
/// of sample_matrix(spec, 1, stream.child(j)), a matrix uses
/// sample_matrix(spec, n, stream.child(j)).

/// |X| / sqrt(N) against P(|X| >= C s sqrt(N)) <= exp(-s sqrt(N)).
/// Requires trials >= 1000.
TailReport check_paouris(const EnsembleSpec& spec, std::span<const double> s_grid,
                         std::size_t trials, const RngStream& stream, unsigned workers = 1);

/// top_m_norm(X, m) / (sqrt(m) log(eN/m)) against
///   exp(-sigma^{-1}(t sqrt(m) log(eN/m) / sqrt(log(em/m_0))))   (primary),
///   exp(-t sqrt(m) log(eN/m) / sqrt(log(em)))                   (generic model),
///   exp(-sigma^{-1}(t sqrt(m) log(eN/m)))                        (no log factor).
TailReport check_projection_sup(const EnsembleSpec& spec, std::size_t m,
                                std::span<const double> t_grid, std::size_t trials,
                                const SigmaModel& sigma, const RngStream& stream,
                                unsigned workers = 1);

/// X*(ell) on raw thresholds against exp(-sigma^{-1}(t sqrt(ell) / C)); the
/// fit uses grid points with t >= grid_C log(eN/ell).
TailReport check_order_stat(const EnsembleSpec& spec, std::size_t ell,
                            std::span<const double> t_grid, std::size_t trials,
                            const SigmaModel& sigma, const RngStream& stream,
                            double grid_C = 1.0, unsigned workers = 1);

struct CountMomentsReport {
  double t = 0.0;
  double p = 0.0;
  std::size_t trials = 0;
  double lhs = 0.0;        ///< (E (t^2 N_X(t))^p)^{1/p}
  double rhs_base = 0.0;   ///< sigma(p)^2
  double fitted_C = 0.0;   ///< sqrt(lhs) / sigma(p)
  double mean_count = 0.0;
  double admissibility_C = 1.0;
};

/// Monte Carlo moment of the signed exceedance count. Requires
/// 2 <= p <= 8 and t >= admissibility_C log(N t^2 / sigma(p)^2).
CountMomentsReport check_count_moments(const EnsembleSpec& spec, double t, double p,
                                       std::size_t trials, const SigmaModel& sigma,
                                       const RngStream& stream,
                                       double admissibility_C = 1.0, unsigned workers = 1);

struct SigmaEnvelopeRow {
  double p = 0.0;
  double sigma_estimate = 0.0;
  double envelope = 0.0;  ///< sqrt(p) |x| + p ||x||_inf
  double ratio = 0.0;
};

struct WeightedSumReport {
  std::vector<SigmaEnvelopeRow> sigma_rows;
  TailReport order_stat;   ///< Y*(ell) at thresholds t |x| log(eN/ell)
  TailReport projection;   ///< top_m_norm(Y, m) / (sqrt(m) log(eN/m))
  bool small_weight_branch = false;  ///< ||x||_inf < 1/sqrt(m)
};

/// Y = sum_i x_i X_i per trial, with |x| <= 1 and ||x||_inf <= 1.
WeightedSumReport check_weighted_sum(const EnsembleSpec& spec, std::size_t n,
                                     const Eigen::VectorXd& x, std::size_t m,
                                     std::size_t ell, std::span<const double> t_grid,
                                     std::size_t trials, const RngStream& stream,
                                     std::size_t sigma_directions = 16,
                                     unsigned workers = 1);

/// Exponents of the two weighted-sum branches at weight bound b and level t:
/// first = t sqrt(m) L / (b sqrt(log(e^2 b^2 m))), second =
/// min{t^2 m L^2, (t/b) sqrt(m) L}, L = log(eN/m).
std::pair<double, double> weighted_branch_exponents(double t, double b, std::size_t m,
                                                    std::size_t N);

struct AkmTailOptions {
  bool exact = true;
  std::uint64_t budget = kDefaultBudget;
  std::size_t restarts = 20;   ///< heuristic mode only
  bool uniform_in_k = false;
};

/// A_{k,m} / lambda_{k,m} against exp(-t lambda_{k,m} / sqrt(log 3m)); with
/// uniform_in_k, also max_k A_{k,m} / lambda_{k,m} against exp(-t lambda_m).
TailReport check_akm_tail(const EnsembleSpec& spec, std::size_t n, std::size_t k,
                          std::size_t m, std::span<const double> t_grid,
                          std::size_t trials, const RngStream& stream,
                          const AkmTailOptions& options = {}, unsigned workers = 1);

struct KlsReport {
  std::vector<std::size_t> n_grid;
  std::vector<double> medians;
  std::vector<double> fitted_C_per_n;  ///< median / sqrt(N/n)
  double fitted_C = 0.0;
  double slope = 0.0;                  ///< least squares of log median on log n
  std::vector<std::vector<double>> statistic;  ///< per n, per trial
};

/// ||(1/n) A^T A - Id|| per trial; row r of the grid uses stream.child(r).
KlsReport check_kls_rate(const EnsembleSpec& spec, std::span<const std::size_t> n_grid,
                         std::size_t trials, const RngStream& stream, unsigned workers = 1);

/// P(X*(ell) >= t) for N iid unit-variance Laplace coordinates:
/// P(Binomial(N, exp(-sqrt2 t)) >= ell).
double laplace_order_stat_survival(double t, std::size_t ell, std::size_t N);

}  // namespace lcrip
