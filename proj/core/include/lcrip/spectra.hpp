#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lcrip/ensembles.hpp"
#include "lcrip/rng.hpp"

namespace lcrip {

/// Nonincreasing rearrangement X*(1) >= ... >= X*(N) of |x_i|.
std::vector<double> rearrange_desc(std::span<const double> x);

/// X*(ell): the ell-th largest magnitude, 1 <= ell <= x.size().
double order_statistic(std::span<const double> x, std::size_t ell);

enum class ExceedMode {
  Signed,    ///< #{i : x_i >= t}
  Absolute,  ///< #{i : |x_i| >= t}
};

std::size_t count_exceed(std::span<const double> x, double t, ExceedMode mode);

/// Euclidean norm of the m largest-magnitude coordinates, which equals
/// max over |I| = m of |P_I x|. Requires 1 <= m <= x.size().
double top_m_norm(std::span<const double> x, std::size_t m);

/// Weak moment profile p -> sigma(p) used by the tail bounds.
///
/// GenericLogConcave is the universal envelope sigma(p) = p on p >= 1
/// (every isotropic log-concave law satisfies sigma_X(p) <= p). Empirical
/// holds estimated (p, sigma) pairs, forced nondecreasing, interpolated
/// linearly and continued by rays through the origin outside the grid.
class SigmaModel {
 public:
  enum class Kind { GenericLogConcave, Empirical };

  static SigmaModel generic(std::size_t dim = 0);
  static SigmaModel empirical(std::vector<double> p_grid,
                              std::vector<double> sigma_values,
                              std::size_t dim = 0);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] const std::vector<double>& p_grid() const noexcept { return p_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return sigma_; }

  /// Model value at p > 0.
  [[nodiscard]] double operator()(double p) const;

  /// Smallest s accepted by inverse(): sigma at the lowest tabulated p
  /// (p = 1 for the generic model).
  [[nodiscard]] double lower_limit() const;

  /// sup{p : sigma(p) <= s} by bisection. Throws std::invalid_argument
  /// when s < lower_limit().
  [[nodiscard]] double inverse(double s) const;

  /// As inverse(), but continues below lower_limit() along the ray
  /// through the origin instead of throwing.
  [[nodiscard]] double inverse_extended(double s) const;

  /// Number of (p, t) grid pairs with sigma(t p) > 2 t sigma(p), p >= 2, t >= 1.
  [[nodiscard]] std::size_t growth_violations(std::span<const double> p_values,
                                              std::span<const double> t_values) const;

 private:
  SigmaModel() = default;
  double bisect_inverse(double s) const;

  Kind kind_ = Kind::GenericLogConcave;
  std::size_t dim_ = 0;
  std::vector<double> p_;
  std::vector<double> sigma_;
};

/// Lower estimate of sigma_X(p) from a trials x N sample matrix: the best
/// empirical p-th moment root over the coordinate axes and `directions`
/// random unit vectors, refined by projected gradient ascent on the sphere.
double sigma_estimate_from_samples(const Eigen::MatrixXd& samples, double p,
                                   std::size_t directions,
                                   const RngStream& stream);

/// Draws `trials` vectors (rows from stream.child(0)) and estimates
/// sigma_X(p); random directions come from stream.child(1).
/// Requires p >= 2 and trials >= 1000 p.
double sigma_estimate(const EnsembleSpec& spec, double p, std::size_t trials,
                      std::size_t directions, const RngStream& stream);

/// Empirical SigmaModel on `p_grid` from a single shared sample.
SigmaModel sigma_profile(const EnsembleSpec& spec, std::span<const double> p_grid,
                         std::size_t trials, std::size_t directions,
                         const RngStream& stream);

struct M0Result {
  std::size_t m0 = 0;
  bool empty = false;  ///< no k in [1, m] qualifies; m0 is then 0
};

/// Largest k <= m with k log(eN/k) <= sigma^{-1}(t sqrt(m) log(eN/m)).
M0Result m0_threshold(const SigmaModel& model, double t, std::size_t m,
                      std::size_t N);

/// Root z in (0, N] of z log(eN/z) = (sqrt(m)/b) log(eN/m), for
/// 1/sqrt(m) <= b <= 1.
double m1_threshold(double b, std::size_t m, std::size_t N);

struct OmegaEvent {
  double t = 1.0;
  std::size_t m = 1;
  std::size_t N = 1;
  double C = 1.0;
};

/// C t sqrt(m) log(eN/m).
double omega_cutoff(const OmegaEvent& ev);

}  // namespace lcrip
