#include "lcrip/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lcrip {

std::string_view to_string(EnsembleKind kind) noexcept {
  switch (kind) {
    case EnsembleKind::ExponentialProduct: return "ExponentialProduct";
    case EnsembleKind::GaussianProduct: return "GaussianProduct";
    case EnsembleKind::UniformCube: return "UniformCube";
    case EnsembleKind::UniformL1Ball: return "UniformL1Ball";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  if (name == "ExponentialProduct" || name == "exponential") {
    return EnsembleKind::ExponentialProduct;
  }
  if (name == "GaussianProduct" || name == "gaussian") {
    return EnsembleKind::GaussianProduct;
  }
  if (name == "UniformCube" || name == "cube") return EnsembleKind::UniformCube;
  if (name == "UniformL1Ball" || name == "l1ball") {
    return EnsembleKind::UniformL1Ball;
  }
  throw std::invalid_argument("unknown ensemble kind: " + std::string(name));
}

double l1_ball_isotropy_radius(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  const double n = static_cast<double>(dim);
  return std::sqrt((n + 1.0) * (n + 2.0) / 2.0);
}

EnsembleSpec::EnsembleSpec(EnsembleKind kind, std::size_t dim)
    : kind_(kind), dim_(dim) {
  if (dim == 0) throw std::invalid_argument("ensemble dimension N must be >= 1");
  if (kind == EnsembleKind::UniformL1Ball) l1_radius_ = l1_ball_isotropy_radius(dim);
}

void draw_into(const EnsembleSpec& spec, Philox4x32& eng, std::span<double> out) {
  if (out.size() != spec.dim()) {
    throw std::invalid_argument("output length does not match ensemble dimension");
  }
  switch (spec.kind()) {
    case EnsembleKind::ExponentialProduct:
      for (double& v : out) v = unit_laplace(eng);
      return;
    case EnsembleKind::GaussianProduct:
      for (double& v : out) v = standard_normal(eng);
      return;
    case EnsembleKind::UniformCube: {
      const double half_width = std::sqrt(3.0);
      for (double& v : out) v = half_width * (2.0 * uniform_open01(eng) - 1.0);
      return;
    }
    case EnsembleKind::UniformL1Ball: {
      // (|L_1|, ..., |L_N|, e) / sum is uniform on the N-simplex; random
      // signs spread it over the cross-polytope.
      double total = 0.0;
      for (double& v : out) {
        const double magnitude = standard_exponential(eng);
        v = (eng() & 1U) ? -magnitude : magnitude;
        total += magnitude;
      }
      total += standard_exponential(eng);
      const double scale = spec.l1_radius() / total;
      for (double& v : out) v *= scale;
      return;
    }
  }
}

Eigen::VectorXd sample_vector(const EnsembleSpec& spec, const RngStream& stream) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(spec.dim()));
  auto eng = stream.engine();
  draw_into(spec, eng, std::span<double>(x.data(), spec.dim()));
  return x;
}

SampleMatrix::SampleMatrix(Eigen::MatrixXd entries,
                           std::optional<Provenance> provenance)
    : entries_(std::move(entries)), provenance_(std::move(provenance)) {
  if (entries_.rows() == 0 || entries_.cols() == 0) {
    throw std::invalid_argument("sample matrix must have positive dimensions");
  }
}

SampleMatrix sample_matrix(const EnsembleSpec& spec, std::size_t n,
                           const RngStream& stream) {
  if (n == 0) throw std::invalid_argument("row count n must be >= 1");
  const auto cols = static_cast<Eigen::Index>(spec.dim());
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), cols);
  std::vector<double> row(spec.dim());
  for (std::size_t i = 0; i < n; ++i) {
    auto eng = stream.child(i).engine();
    draw_into(spec, eng, row);
    for (Eigen::Index j = 0; j < cols; ++j) {
      a(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
    }
  }
  return SampleMatrix(std::move(a), Provenance{spec, stream});
}

double psi1_norm_estimate(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("psi1 estimate needs samples");
  double max_abs = 0.0;
  for (double z : samples) max_abs = std::max(max_abs, std::abs(z));
  if (max_abs == 0.0) return 0.0;

  // mean exp(|z|/C) is decreasing in C; find the crossing of 2.
  auto excess = [&](double c) {
    double acc = 0.0;
    for (double z : samples) acc += std::exp(std::abs(z) / c);
    return acc / static_cast<double>(samples.size()) - 2.0;
  };
  double lo = max_abs / 700.0;  // exp stays finite above this
  double hi = max_abs;
  while (excess(hi) > 0.0) hi *= 2.0;
  if (excess(lo) <= 0.0) return lo;
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

IsotropyReport isotropy_report(const EnsembleSpec& spec, std::size_t trials,
                               const RngStream& stream) {
  if (trials < 100) throw std::invalid_argument("isotropy report needs trials >= 100");
  const auto dim = static_cast<Eigen::Index>(spec.dim());
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<double> marginal(trials);
  for (std::size_t j = 0; j < trials; ++j) {
    const Eigen::VectorXd x = sample_vector(spec, stream.child(j));
    sum += x;
    second.selfadjointView<Eigen::Lower>().rankUpdate(x);
    marginal[j] = x(0);
  }
  const double t = static_cast<double>(trials);
  const Eigen::VectorXd mean = sum / t;
  Eigen::MatrixXd cov = second.selfadjointView<Eigen::Lower>();
  cov /= t;
  cov -= mean * mean.transpose();

  IsotropyReport report;
  report.trials = trials;
  report.mean_norm = mean.norm();
  report.max_abs_mean = mean.cwiseAbs().maxCoeff();
  report.max_cov_deviation =
      (cov - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  report.psi1_estimate = psi1_norm_estimate(marginal);
  return report;
}

}  // namespace lcrip
