#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "lcrip/rng.hpp"

namespace lcrip {

/// Isotropic log-concave laws with exact (rejection-free) samplers.
enum class EnsembleKind {
  ExponentialProduct,  ///< iid symmetric exponential, density 2^{-1/2} e^{-sqrt2 |t|}
  GaussianProduct,     ///< iid standard normal
  UniformCube,         ///< uniform on [-sqrt3, sqrt3]^N
  UniformL1Ball,       ///< uniform on r * B_1^N with r the isotropy radius
};

std::string_view to_string(EnsembleKind kind) noexcept;

/// Accepts the canonical names plus the short CLI aliases
/// (exponential, gaussian, cube, l1ball). Throws std::invalid_argument.
EnsembleKind parse_ensemble_kind(std::string_view name);

/// Radius r such that the uniform law on r * B_1^N is isotropic.
///
/// A coordinate of the uniform law on B_1^N has density proportional to
/// (1 - |t|)^{N-1}, so its variance is 2 / ((N + 1)(N + 2)).
double l1_ball_isotropy_radius(std::size_t dim);

class EnsembleSpec {
 public:
  EnsembleSpec(EnsembleKind kind, std::size_t dim);

  [[nodiscard]] EnsembleKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  /// Cached isotropy radius; only meaningful for UniformL1Ball.
  [[nodiscard]] double l1_radius() const noexcept { return l1_radius_; }

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;

 private:
  EnsembleKind kind_;
  std::size_t dim_;
  double l1_radius_ = 0.0;
};

/// Fills `out` (length spec.dim()) with one draw, consuming `eng`.
void draw_into(const EnsembleSpec& spec, Philox4x32& eng, std::span<double> out);

Eigen::VectorXd sample_vector(const EnsembleSpec& spec, const RngStream& stream);

struct Provenance {
  EnsembleSpec spec;
  RngStream stream;
};

/// n x N matrix whose rows are independent draws. Immutable once built;
/// the transpose is the column-vector form Gamma = A^T.
class SampleMatrix {
 public:
  explicit SampleMatrix(Eigen::MatrixXd entries,
                        std::optional<Provenance> provenance = std::nullopt);

  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
  [[nodiscard]] Eigen::Index rows() const noexcept { return entries_.rows(); }
  [[nodiscard]] Eigen::Index cols() const noexcept { return entries_.cols(); }
  [[nodiscard]] const std::optional<Provenance>& provenance() const noexcept {
    return provenance_;
  }

 private:
  Eigen::MatrixXd entries_;
  std::optional<Provenance> provenance_;
};

/// Row i is drawn from stream.child(i).
SampleMatrix sample_matrix(const EnsembleSpec& spec, std::size_t n,
                           const RngStream& stream);

struct IsotropyReport {
  std::size_t trials = 0;
  double mean_norm = 0.0;          ///< Euclidean norm of the sample mean
  double max_abs_mean = 0.0;       ///< largest |mean coordinate|
  double max_cov_deviation = 0.0;  ///< max_ij |cov_ij - delta_ij|
  double psi1_estimate = 0.0;      ///< empirical psi_1 norm of <X, e_1>
};

/// Trial j uses stream.child(j). Requires trials >= 100.
IsotropyReport isotropy_report(const EnsembleSpec& spec, std::size_t trials,
                               const RngStream& stream);

/// Empirical psi_1 norm inf{C > 0 : mean exp(|z|/C) <= 2} by bisection.
double psi1_norm_estimate(std::span<const double> samples);

}  // namespace lcrip
