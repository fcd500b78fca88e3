#include "lcrip/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lcrip/errors.hpp"
#include "lcrip/parallel.hpp"

namespace lcrip {
namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double level) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i)) - level;
    out(i) = mag > 0.0 ? std::copysign(mag, v(i)) : 0.0;
  }
  return out;
}

}  // namespace

double rip_b_m(std::size_t m, std::size_t n, std::size_t N) {
  if (m == 0) throw std::invalid_argument("m must be >= 1");
  const double dm = static_cast<double>(m);
  const double l = std::log(3.0 * static_cast<double>(std::max(N, n)) / dm);
  return dm * std::log(std::log(3.0 * dm)) * l * l;
}

double rip_admissibility_lhs(std::size_t m, std::size_t n, std::size_t N) {
  return rip_b_m(m, n, N);
}

double rip_admissibility_rhs(std::size_t n, double theta, double c) {
  return c * theta * theta * static_cast<double>(n) / std::log(3.0 / theta);
}

RipAdmissibility rip_admissible_m(std::size_t n, std::size_t N, double theta, double c,
                                  double C1) {
  check_theta(theta);
  if (n == 0 || N == 0) throw std::invalid_argument("n and N must be >= 1");
  if (!(c > 0.0) || !(C1 > 0.0)) throw std::invalid_argument("constants must be positive");
  RipAdmissibility out;
  out.C1 = C1;
  const double rhs = rip_admissibility_rhs(n, theta, c);
  for (std::size_t m = 1; m <= N; ++m) {
    if (rip_admissibility_lhs(m, n, N) <= rhs) out.m = m;
  }
  if (out.m == 0) {
    out.diagnostic = "no m in [1, N] satisfies m loglog(3m) log^2(3max{N,n}/m) <= "
                     "c theta^2 n / log(3/theta)";
    return out;
  }
  const double dn = static_cast<double>(n);
  out.b_m = rip_b_m(out.m, n, N);
  out.b_m_small = out.b_m <= c * theta * dn;
  if (out.b_m < dn) {
    const double l = std::log(dn / out.b_m);
    out.B = C1 * l;
    const double dm = static_cast<double>(out.m);
    out.sparsity_condition =
        dm * std::log(3.0 * static_cast<double>(N) / dm) * l * l <= c * theta * theta * dn;
  } else {
    out.diagnostic = "b_m >= n: B = C1 log(n/b_m) is not positive";
  }
  return out;
}

std::vector<double> estimate_akm_mean_sq(const EnsembleSpec& spec, std::size_t n,
                                         std::size_t m, std::size_t replicas,
                                         const RngStream& stream, std::uint64_t budget,
                                         unsigned workers) {
  if (replicas == 0) throw std::invalid_argument("need at least one replica");
  if (n == 0 || m == 0 || m > spec.dim()) throw std::invalid_argument("need n >= 1, 1 <= m <= N");
  std::vector<std::vector<double>> squares(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    const SampleMatrix a = sample_matrix(spec, n, stream.child(r));
    const auto profile = akm_profile(a.matrix(), m, budget);
    squares[r].resize(n);
    for (std::size_t k = 0; k < n; ++k) squares[r][k] = profile[k].value * profile[k].value;
  });
  std::vector<double> mean(n, 0.0);
  for (const auto& row : squares) {
    for (std::size_t k = 0; k < n; ++k) mean[k] += row[k];
  }
  for (double& v : mean) v /= static_cast<double>(replicas);
  return mean;
}

std::size_t certificate_k_star(std::span<const double> profile, double B) {
  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= profile.size(); ++k) {
    const double ratio = profile[k - 1] / B;
    if (static_cast<double>(k) <= ratio * ratio) k_star = k;
  }
  return k_star;
}

RipCertificate rip_certificate(const SampleMatrix& a, std::size_t m, double theta, double B,
                               std::size_t replicas, const RngStream& stream,
                               const RipCertificateOptions& options) {
  check_theta(theta);
  if (!(B >= 1.0)) throw std::invalid_argument("B must be >= 1");
  const auto n = static_cast<std::size_t>(a.rows());
  const auto big_n = static_cast<std::size_t>(a.cols());
  if (m == 0 || m > big_n) throw std::invalid_argument("need 1 <= m <= N");
  if (options.cached_mean_sq == nullptr) {
    if (replicas == 0) throw std::invalid_argument("replicas = 0 and no cached mean");
    if (!a.provenance()) throw std::invalid_argument("replicas need the matrix provenance");
  } else if (options.cached_mean_sq->size() != n) {
    throw std::invalid_argument("cached mean has the wrong length");
  }

  RipCertificate cert;
  cert.m = m;
  cert.theta = theta;
  cert.B = B;
  cert.n = n;
  cert.akm_profile.resize(n);
  try {
    const auto profile = akm_profile(a.matrix(), m, options.budget, options.workers);
    for (std::size_t k = 0; k < n; ++k) cert.akm_profile[k] = profile[k].value;
  } catch (const BudgetExceeded&) {
    cert.akm_method = Method::Heuristic;
    const RngStream search = stream.child(std::numeric_limits<std::uint64_t>::max());
    for (std::size_t k = 1; k <= n; ++k) {
      cert.akm_profile[k - 1] =
          akm_lower(a.matrix(), k, m, options.heuristic_restarts, search.child(k)).value;
    }
  }
  cert.k_star = certificate_k_star(cert.akm_profile, B);

  if (options.cached_mean_sq != nullptr) {
    cert.replicas = 0;
    if (cert.k_star > 0) cert.akm_mean_sq_estimate = (*options.cached_mean_sq)[cert.k_star - 1];
  } else {
    cert.replicas = replicas;
    if (cert.k_star > 0) {
      const auto mean = estimate_akm_mean_sq(a.provenance()->spec, n, m, replicas, stream,
                                             options.budget, options.workers);
      cert.akm_mean_sq_estimate = mean[cert.k_star - 1];
    }
  }
  if (cert.k_star > 0) cert.akm_value = cert.akm_profile[cert.k_star - 1];
  const double dn = static_cast<double>(n);
  cert.bound = 2.0 * theta +
               2.0 * (cert.akm_value * cert.akm_value + cert.akm_mean_sq_estimate) / dn;

  if (binomial(big_n, m) <= static_cast<double>(options.budget)) {
    cert.exact_delta = delta_m_exact(a.matrix(), m, options.budget, options.workers).delta;
    cert.sound = cert.bound >= *cert.exact_delta;
  }

  const double dm = static_cast<double>(m);
  const double dN = static_cast<double>(big_n);
  cert.truncation_admissible =
      dm * std::log(11.0 * M_E * dN / dm) <= 3.0 * theta * theta * dn / (16.0 * B * B);
  const double log_union = std::log(binomial(big_n, m)) + dm * std::log(11.0) -
                           3.0 * theta * theta * dn / (8.0 * B * B);
  cert.probability_floor = std::max(0.0, 1.0 - std::exp(log_union));
  return cert;
}

BasisPursuitResult basis_pursuit(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                 const BasisPursuitOptions& options) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("A must be nonempty");
  if (y.size() != a.rows()) throw std::invalid_argument("y length must match the rows of A");
  if (!(options.tol > 0.0) || !(options.rho > 0.0)) {
    throw std::invalid_argument("tol and rho must be positive");
  }

  // Row scaling leaves {A x = y} unchanged and conditions A A^T.
  const Eigen::VectorXd row_norms = a.rowwise().norm();
  if (row_norms.minCoeff() <= 0.0) throw std::invalid_argument("A has a zero row");
  const Eigen::MatrixXd as = row_norms.cwiseInverse().asDiagonal() * a;
  const Eigen::VectorXd ys = y.cwiseQuotient(row_norms);
  const Eigen::LLT<Eigen::MatrixXd> gram(as * as.transpose());
  if (gram.info() != Eigen::Success ||
      gram.matrixLLT().diagonal().minCoeff() <= 1e-10 * gram.matrixLLT().diagonal().maxCoeff()) {
    throw std::invalid_argument("rows of A must be linearly independent");
  }
  auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - as.transpose() * gram.solve(as * v - ys);
  };

  const double level = 1.0 / options.rho;
  BasisPursuitResult out;
  Eigen::VectorXd z = project(Eigen::VectorXd::Zero(a.cols()));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(a.cols());
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const Eigen::VectorXd x = project(z - u);
    Eigen::VectorXd next = soft_threshold(x + u, level);
    u += x - next;
    out.change = (next - z).norm();
    z = std::move(next);
    out.residual = (a * z - y).norm();
    out.iterations = it;
    if (out.residual <= options.tol && out.change <= options.tol) {
      out.converged = true;
      break;
    }
  }
  out.x = z;

  if (out.converged && options.polish) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (z(i) != 0.0) support.push_back(i);
    }
    if (!support.empty() && support.size() <= static_cast<std::size_t>(a.rows())) {
      Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(support.size()));
      for (std::size_t j = 0; j < support.size(); ++j) {
        sub.col(static_cast<Eigen::Index>(j)) = a.col(support[j]);
      }
      const Eigen::VectorXd w = sub.colPivHouseholderQr().solve(y);
      Eigen::VectorXd candidate = Eigen::VectorXd::Zero(a.cols());
      for (std::size_t j = 0; j < support.size(); ++j) {
        candidate(support[j]) = w(static_cast<Eigen::Index>(j));
      }
      const double residual = (a * candidate - y).norm();
      if (residual <= std::max(out.residual, options.tol) &&
          candidate.lpNorm<1>() <= z.lpNorm<1>() + options.tol) {
        out.x = std::move(candidate);
        out.residual = residual;
        out.polished = true;
      }
    }
  }
  return out;
}

RecoveryTrial recovery_trial(const EnsembleSpec& spec, std::size_t n, std::size_t N,
                             std::size_t sparsity, const RngStream& stream,
                             const BasisPursuitOptions& options) {
  if (spec.dim() != N) throw std::invalid_argument("ensemble dimension must equal N");
  if (n == 0 || n > N) throw std::invalid_argument("need 1 <= n <= N");
  if (2 * sparsity > n) throw std::invalid_argument("need sparsity <= n / 2");

  RecoveryTrial trial;
  trial.n = n;
  trial.N = N;
  trial.sparsity = sparsity;

  const SampleMatrix a = sample_matrix(spec, n, stream.child(0));
  const Eigen::MatrixXd scaled = a.matrix() / std::sqrt(static_cast<double>(n));

  auto eng = stream.child(1).engine();
  std::vector<std::size_t> perm(N);
  for (std::size_t i = 0; i < N; ++i) perm[i] = i;
  for (std::size_t i = 0; i < sparsity; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(eng, N - i));
    std::swap(perm[i], perm[j]);
  }
  trial.support.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(sparsity));
  std::sort(trial.support.begin(), trial.support.end());
  trial.signal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
  for (std::size_t idx : trial.support) {
    trial.signal(static_cast<Eigen::Index>(idx)) = standard_normal(eng);
  }
  const double norm = trial.signal.norm();
  if (norm > 0.0) trial.signal /= norm;

  const Eigen::VectorXd y = scaled * trial.signal;
  const BasisPursuitResult bp = basis_pursuit(scaled, y, options);
  trial.decoded = bp.x;
  trial.residual = bp.residual;
  trial.iterations = bp.iterations;
  const double err = (bp.x - trial.signal).norm();
  trial.rel_error = norm > 0.0 ? err / trial.signal.norm() : err;
  if (!bp.converged) {
    trial.reason = "solver did not converge within max_iter";
  } else if (trial.residual > options.tol) {
    trial.reason = "residual above tolerance";
  } else if (!(trial.rel_error <= kRecoveryTolerance)) {
    trial.reason = "relative error above 1e-4";
  } else {
    trial.success = true;
  }
  return trial;
}

PhaseDiagram phase_diagram(const EnsembleSpec& spec, std::size_t n, std::size_t N,
                           std::span<const std::size_t> sparsity_grid,
                           std::size_t trials_per_cell, const RngStream& stream, double theta,
                           double c, const BasisPursuitOptions& options, unsigned workers) {
  if (sparsity_grid.empty()) throw std::invalid_argument("sparsity grid must be nonempty");
  if (trials_per_cell == 0) throw std::invalid_argument("need at least one trial per cell");
  PhaseDiagram diagram;
  diagram.ensemble = std::string(to_string(spec.kind()));
  diagram.n = n;
  diagram.N = N;
  diagram.sparsity_grid.assign(sparsity_grid.begin(), sparsity_grid.end());
  diagram.trials_per_cell = trials_per_cell;
  diagram.master_seed = stream.master_seed;
  diagram.stream_index = stream.stream_index;
  diagram.admissible = rip_admissible_m(n, N, theta, c);

  const double t = static_cast<double>(trials_per_cell);
  for (std::size_t cell = 0; cell < sparsity_grid.size(); ++cell) {
    std::vector<char> ok(trials_per_cell, 0);
    const RngStream row = stream.child(cell);
    parallel_for(trials_per_cell, workers, [&](std::size_t j) {
      ok[j] = recovery_trial(spec, n, N, sparsity_grid[cell], row.child(j), options).success;
    });
    double hits = 0.0;
    for (char v : ok) hits += v ? 1.0 : 0.0;
    const double rate = hits / t;
    diagram.rates.push_back(rate);
    diagram.stderrs.push_back(std::sqrt(rate * (1.0 - rate) / t));
    if (!diagram.transition && rate < 0.5) diagram.transition = sparsity_grid[cell];
  }
  for (std::size_t i = 0; i + 1 < diagram.rates.size(); ++i) {
    if (sparsity_grid[i + 1] < sparsity_grid[i]) continue;
    const double slack = 2.0 * std::max(diagram.stderrs[i], diagram.stderrs[i + 1]);
    if (diagram.rates[i + 1] > diagram.rates[i] + slack) ++diagram.monotone_violations;
  }
  return diagram;
}

}  // namespace lcrip
