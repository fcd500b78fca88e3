#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "lcrip/errors.hpp"
#include "lcrip/parallel.hpp"
#include "lcrip/tailcheck.hpp"

namespace lcrip {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> run_trials(std::size_t trials, unsigned workers,
                               const std::function<double(std::size_t)>& body) {
  std::vector<double> out(trials);
  parallel_for(trials, workers, [&](std::size_t j) { out[j] = body(j); });
  return out;
}

Eigen::VectorXd trial_vector(const EnsembleSpec& spec, const RngStream& stream, std::size_t j) {
  return sample_vector(spec, stream.child(j).child(0));
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double median(std::vector<double> v) { return empirical_quantile(v, 0.5); }

// Tail slope from `preferred`; when too few samples lie beyond it, from the
// 0.9-quantile instead. Records where the fit started.
void add_slope(TailReport& report, double preferred) {
  double from = preferred;
  double slope = log_survival_slope(report.statistic, from);
  if (!std::isfinite(slope)) {
    from = empirical_quantile(report.statistic, 0.9);
    slope = log_survival_slope(report.statistic, from);
  }
  report.calibration.slope = slope;
  report.calibration.convexity_violations = convexity_violations(report.curve);
  report.diagnostics.emplace_back("slope_from", from);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::pair<std::string, std::string>> base_config(const EnsembleSpec& spec,
                                                             std::size_t trials,
                                                             const RngStream& stream) {
  return {{"ensemble", std::string(to_string(spec.kind()))},
          {"N", std::to_string(spec.dim())},
          {"trials", std::to_string(trials)},
          {"master_seed", std::to_string(stream.master_seed)},
          {"stream_index", std::to_string(stream.stream_index)}};
}

double log_ratio(std::size_t N, std::size_t m) {
  return std::log(M_E * static_cast<double>(N) / static_cast<double>(m));
}

}  // namespace

// ---------------------------------------------------------------------------

TailReport check_paouris(const EnsembleSpec& spec, std::span<const double> s_grid,
                         std::size_t trials, const RngStream& stream, unsigned workers) {
  if (trials < 1000) throw std::invalid_argument("paouris check needs trials >= 1000");
  const double root_n = std::sqrt(static_cast<double>(spec.dim()));
  std::vector<double> pow2(trials), pow4(trials), pow8(trials);
  TailReport report;
  report.check_id = "paouris";
  report.statistic = run_trials(trials, workers, [&](std::size_t j) {
    const double norm = trial_vector(spec, stream, j).norm();
    pow2[j] = norm * norm;
    pow4[j] = pow2[j] * pow2[j];
    pow8[j] = pow4[j] * pow4[j];
    return norm / root_n;
  });
  report.curve = survival_curve(report.statistic, s_grid, "norm_over_sqrtN", stream.master_seed);

  std::vector<double> scale(s_grid.begin(), s_grid.end());
  std::vector<double> allowed;
  for (double s : s_grid) allowed.push_back(std::exp(-s * root_n));
  report.calibration = fit_scaled_bound("paouris", report.statistic, scale, allowed);
  add_slope(report, 1.5);

  const double t = static_cast<double>(trials);
  auto moment = [&](const std::vector<double>& powers, double p) {
    double acc = 0.0;
    for (double v : powers) acc += v;
    return std::pow(acc / t, 1.0 / p) / (root_n + p);
  };
  report.diagnostics.emplace_back("median", median(report.statistic));
  report.diagnostics.emplace_back("moment_ratio_p2", moment(pow2, 2.0));
  report.diagnostics.emplace_back("moment_ratio_p4", moment(pow4, 4.0));
  report.diagnostics.emplace_back("moment_ratio_p8", moment(pow8, 8.0));
  report.config = base_config(spec, trials, stream);
  return report;
}

TailReport check_projection_sup(const EnsembleSpec& spec, std::size_t m,
                                std::span<const double> t_grid, std::size_t trials,
                                const SigmaModel& sigma, const RngStream& stream,
                                unsigned workers) {
  const std::size_t big_n = spec.dim();
  if (m == 0 || m > big_n) throw std::invalid_argument("projection check needs 1 <= m <= N");
  if (trials == 0) throw std::invalid_argument("projection check needs trials >= 1");
  const double dm = static_cast<double>(m);
  const double unit = std::sqrt(dm) * log_ratio(big_n, m);

  TailReport report;
  report.check_id = "projection_sup";
  report.statistic = run_trials(trials, workers, [&](std::size_t j) {
    const Eigen::VectorXd x = trial_vector(spec, stream, j);
    return top_m_norm(as_span(x), m) / unit;
  });
  report.curve = survival_curve(report.statistic, t_grid, "top_m_norm_normalized",
                                stream.master_seed);

  std::vector<double> scale(t_grid.begin(), t_grid.end());
  std::vector<double> with_m0, generic, no_log;
  double empty_m0 = 0.0;
  for (double t : t_grid) {
    if (!(t >= 1.0)) throw std::invalid_argument("projection grid needs t >= 1");
    const M0Result m0 = m0_threshold(sigma, t, m, big_n);
    if (m0.empty) empty_m0 += 1.0;
    const double m0_used = m0.empty ? 1.0 : static_cast<double>(m0.m0);
    const double level = t * unit;
    with_m0.push_back(
        std::exp(-sigma.inverse_extended(level / std::sqrt(std::log(M_E * dm / m0_used)))));
    generic.push_back(std::exp(-level / std::sqrt(std::log(M_E * dm))));
    no_log.push_back(std::exp(-sigma.inverse_extended(level)));
  }
  report.calibration = fit_scaled_bound("projection_sup_sigma", report.statistic, scale, with_m0);
  report.extra.push_back(
      fit_scaled_bound("projection_sup_generic", report.statistic, scale, generic));
  report.extra.push_back(
      fit_scaled_bound("projection_sup_no_log", report.statistic, scale, no_log));
  add_slope(report, 1.0);
  report.diagnostics.emplace_back("q99_normalized", empirical_quantile(report.statistic, 0.99));
  report.diagnostics.emplace_back("median_normalized", median(report.statistic));
  report.diagnostics.emplace_back("m0_empty_points", empty_m0);
  report.config = base_config(spec, trials, stream);
  report.config.emplace_back("m", std::to_string(m));
  report.config.emplace_back(
      "sigma_model", sigma.kind() == SigmaModel::Kind::GenericLogConcave ? "generic" : "empirical");
  return report;
}

TailReport check_order_stat(const EnsembleSpec& spec, std::size_t ell,
                            std::span<const double> t_grid, std::size_t trials,
                            const SigmaModel& sigma, const RngStream& stream, double grid_C,
                            unsigned workers) {
  const std::size_t big_n = spec.dim();
  if (ell == 0 || ell > big_n) throw std::invalid_argument("order statistic needs 1 <= ell <= N");
  if (trials == 0) throw std::invalid_argument("order statistic check needs trials >= 1");
  const double root_ell = std::sqrt(static_cast<double>(ell));
  const double floor_t = grid_C * log_ratio(big_n, ell);

  TailReport report;
  report.check_id = "order_stat";
  report.statistic = run_trials(trials, workers, [&](std::size_t j) {
    const Eigen::VectorXd x = trial_vector(spec, stream, j);
    return order_statistic(as_span(x), ell);
  });
  report.curve = survival_curve(report.statistic, t_grid, "order_statistic", stream.master_seed);

  std::vector<bool> use;
  double used = 0.0;
  for (double t : t_grid) {
    use.push_back(t >= floor_t);
    used += t >= floor_t ? 1.0 : 0.0;
  }
  auto constant = [&](const SigmaModel& model) {
    return [&, model](std::size_t i, double level) {
      if (level == kInf) return 0.0;
      if (level <= 0.0) return kInf;
      return t_grid[i] * root_ell / model(level);
    };
  };
  report.calibration = fit_exponent_bound("order_stat_sigma", report.curve, constant(sigma), use);
  report.extra.push_back(fit_exponent_bound("order_stat_generic", report.curve,
                                            constant(SigmaModel::generic(big_n)), use));
  add_slope(report, floor_t);
  report.diagnostics.emplace_back("grid_floor", floor_t);
  report.diagnostics.emplace_back("fit_points", used);
  report.config = base_config(spec, trials, stream);
  report.config.emplace_back("ell", std::to_string(ell));
  report.config.emplace_back("grid_C", fmt(grid_C));
  return report;
}

CountMomentsReport check_count_moments(const EnsembleSpec& spec, double t, double p,
                                       std::size_t trials, const SigmaModel& sigma,
                                       const RngStream& stream, double admissibility_C,
                                       unsigned workers) {
  if (!(p >= 2.0 && p <= 8.0)) throw std::invalid_argument("count moments need 2 <= p <= 8");
  if (!(t > 0.0)) throw std::invalid_argument("count moments need t > 0");
  if (trials == 0) throw std::invalid_argument("count moments need trials >= 1");
  const double sp = sigma(p);
  const double big_n = static_cast<double>(spec.dim());
  const double needed = admissibility_C * std::log(big_n * t * t / (sp * sp));
  if (t < needed) {
    throw std::invalid_argument("t = " + fmt(t) + " is inadmissible: needs t >= " + fmt(needed));
  }
  const std::vector<double> counts = run_trials(trials, workers, [&](std::size_t j) {
    const Eigen::VectorXd x = trial_vector(spec, stream, j);
    return static_cast<double>(count_exceed(as_span(x), t, ExceedMode::Signed));
  });
  double moment = 0.0;
  double mean = 0.0;
  for (double c : counts) {
    moment += std::pow(c, p);
    mean += c;
  }
  const double dt = static_cast<double>(trials);
  CountMomentsReport report;
  report.t = t;
  report.p = p;
  report.trials = trials;
  report.lhs = t * t * std::pow(moment / dt, 1.0 / p);
  report.rhs_base = sp * sp;
  report.fitted_C = std::sqrt(report.lhs) / sp;
  report.mean_count = mean / dt;
  report.admissibility_C = admissibility_C;
  return report;
}

std::pair<double, double> weighted_branch_exponents(double t, double b, std::size_t m,
                                                    std::size_t N) {
  if (m == 0 || m > N) throw std::invalid_argument("branch exponents need 1 <= m <= N");
  if (!(b > 0.0)) throw std::invalid_argument("branch exponents need b > 0");
  const double dm = std::sqrt(static_cast<double>(m));
  const double l = log_ratio(N, m);
  const double first = t * dm * l / (b * std::sqrt(std::log(M_E * M_E * b * b * dm * dm)));
  const double second = std::min(t * t * dm * dm * l * l, t / b * dm * l);
  return {first, second};
}

WeightedSumReport check_weighted_sum(const EnsembleSpec& spec, std::size_t n,
                                     const Eigen::VectorXd& x, std::size_t m, std::size_t ell,
                                     std::span<const double> t_grid, std::size_t trials,
                                     const RngStream& stream, std::size_t sigma_directions,
                                     unsigned workers) {
  const std::size_t big_n = spec.dim();
  if (n == 0 || static_cast<std::size_t>(x.size()) != n) {
    throw std::invalid_argument("weight vector must have length n >= 1");
  }
  const double x_norm = x.norm();
  const double b = x.cwiseAbs().maxCoeff();
  if (!(x_norm > 0.0) || x_norm > 1.0 + 1e-12 || b > 1.0) {
    throw std::invalid_argument("weights need 0 < |x| <= 1 and ||x||_inf <= 1");
  }
  if (m == 0 || m > big_n || ell == 0 || ell > big_n) {
    throw std::invalid_argument("weighted sum needs 1 <= m, ell <= N");
  }
  if (trials == 0) throw std::invalid_argument("weighted sum needs trials >= 1");

  Eigen::MatrixXd ys(static_cast<Eigen::Index>(trials), static_cast<Eigen::Index>(big_n));
  parallel_for(trials, workers, [&](std::size_t j) {
    const SampleMatrix a = sample_matrix(spec, n, stream.child(j));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(big_n));
    for (std::size_t i = 0; i < n; ++i) {
      y += x(static_cast<Eigen::Index>(i)) * a.matrix().row(static_cast<Eigen::Index>(i)).transpose();
    }
    ys.row(static_cast<Eigen::Index>(j)) = y.transpose();
  });

  WeightedSumReport out;
  const RngStream direction_stream = stream.child(std::numeric_limits<std::uint64_t>::max());
  for (double p : {2.0, 4.0, 8.0}) {
    SigmaEnvelopeRow row;
    row.p = p;
    row.sigma_estimate = sigma_estimate_from_samples(ys, p, sigma_directions, direction_stream);
    row.envelope = std::sqrt(p) * x_norm + p * b;
    row.ratio = row.sigma_estimate / row.envelope;
    out.sigma_rows.push_back(row);
  }
  auto config = base_config(spec, trials, stream);
  config.emplace_back("n", std::to_string(n));
  config.emplace_back("m", std::to_string(m));
  config.emplace_back("ell", std::to_string(ell));
  config.emplace_back("x_norm", fmt(x_norm));
  config.emplace_back("x_sup", fmt(b));

  // Order statistic of Y on thresholds t |x| log(eN/ell).
  {
    TailReport& r = out.order_stat;
    r.check_id = "weighted_order_stat";
    r.statistic.resize(trials);
    for (std::size_t j = 0; j < trials; ++j) {
      const Eigen::VectorXd y = ys.row(static_cast<Eigen::Index>(j)).transpose();
      r.statistic[j] = order_statistic(as_span(y), ell);
    }
    const double unit = x_norm * log_ratio(big_n, ell);
    std::vector<double> taus;
    for (double t : t_grid) taus.push_back(t * unit);
    r.curve = survival_curve(r.statistic, taus, "weighted_order_statistic", stream.master_seed);
    const double dl = static_cast<double>(ell);
    r.calibration = fit_exponent_bound(
        "weighted_order_stat", r.curve, [&](std::size_t i, double level) {
          if (level == kInf) return 0.0;
          if (level <= 0.0) return kInf;
          const double tau = taus[i];
          return std::min(tau * tau * dl / (x_norm * x_norm), tau * std::sqrt(dl) / b) / level;
        });
    add_slope(r, unit);
    r.config = config;
  }

  // Uniform projection tail of Y against the branch selected by b.
  {
    TailReport& r = out.projection;
    r.check_id = "weighted_projection";
    const double unit = std::sqrt(static_cast<double>(m)) * log_ratio(big_n, m);
    r.statistic.resize(trials);
    for (std::size_t j = 0; j < trials; ++j) {
      const Eigen::VectorXd y = ys.row(static_cast<Eigen::Index>(j)).transpose();
      r.statistic[j] = top_m_norm(as_span(y), m) / unit;
    }
    r.curve = survival_curve(r.statistic, t_grid, "weighted_top_m_norm_normalized",
                             stream.master_seed);
    const double boundary = 1.0 / std::sqrt(static_cast<double>(m));
    out.small_weight_branch = b < boundary;
    std::vector<double> scale(t_grid.begin(), t_grid.end());
    std::vector<double> allowed;
    for (double t : t_grid) {
      const auto [first, second] = weighted_branch_exponents(t, b, m, big_n);
      allowed.push_back(std::exp(-(out.small_weight_branch ? second : first)));
    }
    r.calibration = fit_scaled_bound(
        out.small_weight_branch ? "weighted_projection_small_b" : "weighted_projection_large_b",
        r.statistic, scale, allowed);
    add_slope(r, 1.0);
    const auto [first, second] = weighted_branch_exponents(1.0, boundary, m, big_n);
    r.diagnostics.emplace_back("boundary_exponent_large_b", first);
    r.diagnostics.emplace_back("boundary_exponent_small_b", second);
    r.diagnostics.emplace_back("boundary_ratio", second / first);
    r.diagnostics.emplace_back("q99_normalized", empirical_quantile(r.statistic, 0.99));
    r.config = config;
  }
  return out;
}

TailReport check_akm_tail(const EnsembleSpec& spec, std::size_t n, std::size_t k,
                          std::size_t m, std::span<const double> t_grid, std::size_t trials,
                          const RngStream& stream, const AkmTailOptions& options,
                          unsigned workers) {
  const std::size_t big_n = spec.dim();
  if (n == 0 || k == 0 || k > n || m == 0 || m > big_n) {
    throw std::invalid_argument("A_{k,m} tail needs 1 <= k <= n and 1 <= m <= N");
  }
  if (trials == 0) throw std::invalid_argument("A_{k,m} tail needs trials >= 1");
  if (options.exact) {
    const double per_trial = binomial(n, k) * binomial(big_n, m);
    if (per_trial > static_cast<double>(options.budget)) {
      throw BudgetExceeded("exact A_{k,m} exceeds the budget; rerun in heuristic mode");
    }
  }
  const double lam = lambda_km(k, m, n, big_n);
  const double lam_m = lambda_m(m, n, big_n);
  std::vector<double> uniform(options.uniform_in_k ? trials : 0);

  TailReport report;
  report.check_id = "akm_tail";
  report.lower_bound_statistic = !options.exact;
  report.statistic = run_trials(trials, workers, [&](std::size_t j) {
    const SampleMatrix a = sample_matrix(spec, n, stream.child(j));
    double value = 0.0;
    if (options.exact) {
      value = akm_exact(a.matrix(), k, m, options.budget).value;
    } else {
      value = akm_lower(a.matrix(), k, m, options.restarts,
                        stream.child(j).child(std::numeric_limits<std::uint64_t>::max()))
                  .value;
    }
    if (options.uniform_in_k) {
      const auto profile = akm_profile(a.matrix(), m, options.budget);
      double worst = 0.0;
      for (std::size_t kk = 1; kk <= n; ++kk) {
        worst = std::max(worst, profile[kk - 1].value / lambda_km(kk, m, n, big_n));
      }
      uniform[j] = worst;
    }
    return value / lam;
  });
  report.curve = survival_curve(report.statistic, t_grid, "akm_over_lambda", stream.master_seed);

  std::vector<double> scale(t_grid.begin(), t_grid.end());
  std::vector<double> allowed;
  const double damp = std::sqrt(std::log(3.0 * static_cast<double>(m)));
  for (double t : t_grid) allowed.push_back(std::exp(-t * lam / damp));
  report.calibration = fit_scaled_bound("akm_tail", report.statistic, scale, allowed);
  if (options.uniform_in_k) {
    std::vector<double> allowed_uniform;
    for (double t : t_grid) allowed_uniform.push_back(std::exp(-t * lam_m));
    report.extra.push_back(fit_scaled_bound("akm_uniform_in_k", uniform, scale, allowed_uniform));
    report.diagnostics.emplace_back("uniform_q99", empirical_quantile(uniform, 0.99));
  }
  add_slope(report, t_grid.empty() ? 1.0 : t_grid.front());
  report.diagnostics.emplace_back("lambda_km", lam);
  report.diagnostics.emplace_back("lambda_m", lam_m);
  report.diagnostics.emplace_back("max_statistic",
                                  *std::max_element(report.statistic.begin(), report.statistic.end()));
  report.config = base_config(spec, trials, stream);
  report.config.emplace_back("n", std::to_string(n));
  report.config.emplace_back("k", std::to_string(k));
  report.config.emplace_back("m", std::to_string(m));
  report.config.emplace_back("mode", options.exact ? "exact" : "heuristic");
  return report;
}

KlsReport check_kls_rate(const EnsembleSpec& spec, std::span<const std::size_t> n_grid,
                         std::size_t trials, const RngStream& stream, unsigned workers) {
  const std::size_t big_n = spec.dim();
  if (n_grid.empty()) throw std::invalid_argument("KLS check needs a nonempty n grid");
  for (std::size_t n : n_grid) {
    if (n < big_n) throw std::invalid_argument("KLS check needs every n >= N");
  }
  if (trials == 0) throw std::invalid_argument("KLS check needs trials >= 1");
  KlsReport report;
  report.n_grid.assign(n_grid.begin(), n_grid.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t r = 0; r < n_grid.size(); ++r) {
    const std::size_t n = n_grid[r];
    const RngStream row = stream.child(r);
    std::vector<double> stat = run_trials(trials, workers, [&](std::size_t j) {
      const SampleMatrix a = sample_matrix(spec, n, row.child(j));
      return delta_m_exact(a.matrix(), big_n).delta;
    });
    const double med = median(stat);
    report.medians.push_back(med);
    const double c = med / std::sqrt(static_cast<double>(big_n) / static_cast<double>(n));
    report.fitted_C_per_n.push_back(c);
    report.fitted_C = std::max(report.fitted_C, c);
    const double lx = std::log(static_cast<double>(n));
    const double ly = std::log(med);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    report.statistic.push_back(std::move(stat));
  }
  const double count = static_cast<double>(n_grid.size());
  const double denom = count * sxx - sx * sx;
  report.slope = denom > 0.0 ? (count * sxy - sx * sy) / denom
                             : std::numeric_limits<double>::quiet_NaN();
  return report;
}

double laplace_order_stat_survival(double t, std::size_t ell, std::size_t N) {
  if (ell == 0 || ell > N) throw std::invalid_argument("order statistic needs 1 <= ell <= N");
  if (t <= 0.0) return 1.0;
  const double log_q = -M_SQRT2 * t;
  const double log_1mq = std::log1p(-std::exp(log_q));
  const double dn = static_cast<double>(N);
  double total = 0.0;
  for (std::size_t j = ell; j <= N; ++j) {
    const double dj = static_cast<double>(j);
    const double log_term = std::lgamma(dn + 1.0) - std::lgamma(dj + 1.0) -
                            std::lgamma(dn - dj + 1.0) + dj * log_q + (dn - dj) * log_1mq;
    total += std::exp(log_term);
  }
  return std::min(total, 1.0);
}

}  // namespace lcrip
