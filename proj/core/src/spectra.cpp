#include "lcrip/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace lcrip {

std::vector<double> rearrange_desc(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [](double v) { return std::abs(v); });
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double order_statistic(std::span<const double> x, std::size_t ell) {
  if (ell == 0 || ell > x.size()) {
    throw std::invalid_argument("order statistic index out of range");
  }
  std::vector<double> mags(x.size());
  std::transform(x.begin(), x.end(), mags.begin(),
                 [](double v) { return std::abs(v); });
  auto nth = mags.begin() + static_cast<std::ptrdiff_t>(ell - 1);
  std::nth_element(mags.begin(), nth, mags.end(), std::greater<>());
  return *nth;
}

std::size_t count_exceed(std::span<const double> x, double t, ExceedMode mode) {
  if (mode == ExceedMode::Signed) {
    return static_cast<std::size_t>(
        std::count_if(x.begin(), x.end(), [t](double v) { return v >= t; }));
  }
  return static_cast<std::size_t>(std::count_if(
      x.begin(), x.end(), [t](double v) { return std::abs(v) >= t; }));
}

double top_m_norm(std::span<const double> x, std::size_t m) {
  if (m == 0 || m > x.size()) throw std::invalid_argument("m must satisfy 1 <= m <= N");
  std::vector<double> sq(x.size());
  std::transform(x.begin(), x.end(), sq.begin(), [](double v) { return v * v; });
  auto cut = sq.begin() + static_cast<std::ptrdiff_t>(m);
  if (m < sq.size()) std::nth_element(sq.begin(), cut - 1, sq.end(), std::greater<>());
  // Summing in descending order makes the result independent of input order.
  std::sort(sq.begin(), cut, std::greater<>());
  double acc = 0.0;
  for (auto it = sq.begin(); it != cut; ++it) acc += *it;
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// SigmaModel

SigmaModel SigmaModel::generic(std::size_t dim) {
  SigmaModel model;
  model.kind_ = Kind::GenericLogConcave;
  model.dim_ = dim;
  return model;
}

SigmaModel SigmaModel::empirical(std::vector<double> p_grid,
                                 std::vector<double> sigma_values,
                                 std::size_t dim) {
  if (p_grid.empty() || p_grid.size() != sigma_values.size()) {
    throw std::invalid_argument("empirical sigma model needs matching nonempty grids");
  }
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] >= 1.0) || (i > 0 && !(p_grid[i] > p_grid[i - 1]))) {
      throw std::invalid_argument("p grid must be increasing with p >= 1");
    }
    if (!(sigma_values[i] > 0.0)) {
      throw std::invalid_argument("sigma values must be positive");
    }
  }
  for (std::size_t i = 1; i < sigma_values.size(); ++i) {
    sigma_values[i] = std::max(sigma_values[i], sigma_values[i - 1]);
  }
  SigmaModel model;
  model.kind_ = Kind::Empirical;
  model.dim_ = dim;
  model.p_ = std::move(p_grid);
  model.sigma_ = std::move(sigma_values);
  return model;
}

double SigmaModel::operator()(double p) const {
  if (!(p > 0.0)) throw std::invalid_argument("sigma(p) needs p > 0");
  if (kind_ == Kind::GenericLogConcave) return p;
  if (p <= p_.front()) return sigma_.front() * p / p_.front();
  if (p >= p_.back()) return sigma_.back() * p / p_.back();
  const auto hi = std::upper_bound(p_.begin(), p_.end(), p);
  const auto i = static_cast<std::size_t>(hi - p_.begin());
  const double w = (p - p_[i - 1]) / (p_[i] - p_[i - 1]);
  return sigma_[i - 1] + w * (sigma_[i] - sigma_[i - 1]);
}

double SigmaModel::lower_limit() const {
  return kind_ == Kind::GenericLogConcave ? 1.0 : sigma_.front();
}

double SigmaModel::bisect_inverse(double s) const {
  // Invariant: sigma(lo) <= s < sigma(hi).
  double lo = 0.0;
  double hi = 1.0;
  while ((*this)(hi) <= s) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) <= s ? lo : hi) = mid;
  }
  return lo;
}

double SigmaModel::inverse(double s) const {
  if (s < lower_limit()) {
    throw std::invalid_argument("sigma inverse argument below the model range");
  }
  if (kind_ == Kind::GenericLogConcave) return s;
  return bisect_inverse(s);
}

double SigmaModel::inverse_extended(double s) const {
  if (s <= 0.0) return 0.0;
  if (kind_ == Kind::GenericLogConcave) return s;
  return bisect_inverse(s);
}

std::size_t SigmaModel::growth_violations(std::span<const double> p_values,
                                          std::span<const double> t_values) const {
  std::size_t violations = 0;
  for (double p : p_values) {
    if (p < 2.0) continue;
    for (double t : t_values) {
      if (t < 1.0) continue;
      if ((*this)(t * p) > 2.0 * t * (*this)(p) * (1.0 + 1e-12)) ++violations;
    }
  }
  return violations;
}

// ---------------------------------------------------------------------------
// sigma estimation

namespace {

double moment_root(const Eigen::VectorXd& proj, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) acc += std::pow(std::abs(proj(i)), p);
  return std::pow(acc / static_cast<double>(proj.size()), 1.0 / p);
}

double moment_along(const Eigen::MatrixXd& samples, const Eigen::VectorXd& dir,
                    double p) {
  return moment_root(samples * dir, p);
}

}  // namespace

double sigma_estimate_from_samples(const Eigen::MatrixXd& samples, double p,
                                   std::size_t directions,
                                   const RngStream& stream) {
  if (!(p >= 1.0)) throw std::invalid_argument("sigma estimate needs p >= 1");
  const Eigen::Index dim = samples.cols();
  if (samples.rows() == 0 || dim == 0) throw std::invalid_argument("empty sample");

  Eigen::VectorXd best_dir = Eigen::VectorXd::Unit(dim, 0);
  double best = -1.0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double value = moment_root(samples.col(j), p);
    if (value > best) {
      best = value;
      best_dir = Eigen::VectorXd::Unit(dim, j);
    }
  }
  for (std::size_t d = 0; d < directions; ++d) {
    auto eng = stream.child(d).engine();
    Eigen::VectorXd dir(dim);
    for (Eigen::Index j = 0; j < dim; ++j) dir(j) = standard_normal(eng);
    dir.normalize();
    const double value = moment_along(samples, dir, p);
    if (value > best) {
      best = value;
      best_dir = dir;
    }
  }

  // Projected gradient ascent of F(t) = mean |<t, X>|^p on the sphere.
  const double n = static_cast<double>(samples.rows());
  double step = 0.5;
  for (int iter = 0; iter < 40 && step > 1e-6; ++iter) {
    const Eigen::VectorXd proj = samples * best_dir;
    Eigen::VectorXd weights(proj.size());
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
      const double a = std::abs(proj(i));
      weights(i) = (a > 0.0 ? std::pow(a, p - 1.0) : 0.0) * (proj(i) < 0 ? -1.0 : 1.0);
    }
    Eigen::VectorXd grad = samples.transpose() * weights / n;
    grad -= grad.dot(best_dir) * best_dir;
    const double gnorm = grad.norm();
    if (gnorm == 0.0) break;
    bool improved = false;
    while (step > 1e-6) {
      Eigen::VectorXd candidate = best_dir + step * grad / gnorm;
      candidate.normalize();
      const double value = moment_along(samples, candidate, p);
      if (value > best) {
        best = value;
        best_dir = candidate;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return best;
}

double sigma_estimate(const EnsembleSpec& spec, double p, std::size_t trials,
                      std::size_t directions, const RngStream& stream) {
  if (!(p >= 2.0)) throw std::invalid_argument("sigma estimate needs p >= 2");
  if (static_cast<double>(trials) < 1000.0 * p) {
    throw std::invalid_argument("sigma estimate needs trials >= 1000 p");
  }
  const SampleMatrix draws = sample_matrix(spec, trials, stream.child(0));
  return sigma_estimate_from_samples(draws.matrix(), p, directions, stream.child(1));
}

SigmaModel sigma_profile(const EnsembleSpec& spec, std::span<const double> p_grid,
                         std::size_t trials, std::size_t directions,
                         const RngStream& stream) {
  if (p_grid.empty()) throw std::invalid_argument("sigma profile needs a p grid");
  const SampleMatrix draws = sample_matrix(spec, trials, stream.child(0));
  std::vector<double> values;
  values.reserve(p_grid.size());
  for (double p : p_grid) {
    values.push_back(
        sigma_estimate_from_samples(draws.matrix(), p, directions, stream.child(1)));
  }
  return SigmaModel::empirical({p_grid.begin(), p_grid.end()}, std::move(values),
                               spec.dim());
}

// ---------------------------------------------------------------------------
// thresholds

M0Result m0_threshold(const SigmaModel& model, double t, std::size_t m,
                      std::size_t N) {
  if (m == 0 || m > N) throw std::invalid_argument("m0 needs 1 <= m <= N");
  if (!(t >= 1.0)) throw std::invalid_argument("m0 needs t >= 1");
  const double dn = static_cast<double>(N);
  const double level = model.inverse_extended(
      t * std::sqrt(static_cast<double>(m)) * std::log(M_E * dn / static_cast<double>(m)));
  // k log(eN/k) increases on [1, N], so the qualifying k form a prefix.
  M0Result result;
  for (std::size_t k = 1; k <= m; ++k) {
    const double dk = static_cast<double>(k);
    if (dk * std::log(M_E * dn / dk) <= level) {
      result.m0 = k;
    } else {
      break;
    }
  }
  result.empty = result.m0 == 0;
  return result;
}

double m1_threshold(double b, std::size_t m, std::size_t N) {
  if (m == 0 || m > N) throw std::invalid_argument("m1 needs 1 <= m <= N");
  const double dm = static_cast<double>(m);
  const double dn = static_cast<double>(N);
  if (!(b >= 1.0 / std::sqrt(dm) && b <= 1.0)) {
    throw std::invalid_argument("m1 needs 1/sqrt(m) <= b <= 1");
  }
  const double target = std::sqrt(dm) / b * std::log(M_E * dn / dm);
  auto f = [dn](double z) { return z * std::log(M_E * dn / z); };
  if (f(dn) <= target) return dn;
  double lo = 0.0;
  double hi = dn;
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double omega_cutoff(const OmegaEvent& ev) {
  if (ev.m == 0 || ev.m > ev.N) throw std::invalid_argument("omega needs 1 <= m <= N");
  if (!(ev.t >= 1.0)) throw std::invalid_argument("omega needs t >= 1");
  if (!(ev.C > 0.0)) throw std::invalid_argument("omega needs C > 0");
  const double dm = static_cast<double>(ev.m);
  return ev.C * ev.t * std::sqrt(dm) * std::log(M_E * static_cast<double>(ev.N) / dm);
}

}  // namespace lcrip
