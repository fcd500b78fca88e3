#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "lcrip/operator_norm.hpp"
#include "lcrip/parallel.hpp"
#include "lcrip/rng.hpp"
#include "lcrip/spectra.hpp"

namespace lcrip::cli {

namespace {

constexpr std::uint64_t kSideStream = std::numeric_limits<std::uint64_t>::max();

EnsembleSpec spec_of(const Options& o) { return {parse_ensemble_kind(o.ensemble), o.N}; }

RngStream root_of(const Options& o) { return {o.seed, o.stream}; }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument(flag + ": cannot parse '" + text + "' as a number");
  }
  return value;
}

std::vector<double> grid_or(const std::string& text, const std::string& flag,
                            const std::string& fallback) {
  return parse_grid(text.empty() ? fallback : text, flag);
}

Eigen::VectorXd weights_of(const Options& o) {
  const auto n = static_cast<Eigen::Index>(o.n);
  if (o.weights == "uniform") {
    return Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(o.n)));
  }
  if (o.weights == "basis") {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x(0) = 1.0;
    return x;
  }
  const auto parts = split(o.weights, ',');
  if (parts.size() != o.n) {
    throw std::invalid_argument("--weights: expected " + std::to_string(o.n) + " values, got " +
                                std::to_string(parts.size()));
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = parse_double(parts[static_cast<std::size_t>(i)], "--weights");
  }
  return x;
}

bool exact_method(const Options& o) { return o.method == "exact"; }

json sigma_model_json(const SigmaModel& model) {
  json out = {{"kind", model.kind() == SigmaModel::Kind::Empirical ? "empirical" : "generic"}};
  if (model.kind() == SigmaModel::Kind::Empirical) {
    out["p_grid"] = model.p_grid();
    out["values"] = model.values();
  }
  return out;
}

SigmaModel sigma_model_of(const Options& o, const EnsembleSpec& spec) {
  if (o.sigma == "generic") return SigmaModel::generic(o.N);
  const std::vector<double> p_grid{2.0, 3.0, 4.0, 6.0, 8.0};
  return sigma_profile(spec, p_grid, o.sigma_trials, o.directions,
                       root_of(o).child(kSideStream));
}

CommandOutput tail_output(const TailReport& report) {
  return {to_json(report), curve_table(report), 0};
}

}  // namespace

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  std::vector<double> grid;
  const auto range = split(text, ':');
  if (range.size() == 3) {
    const double lo = parse_double(range[0], flag);
    const double hi = parse_double(range[1], flag);
    const double count = parse_double(range[2], flag);
    if (!(lo > 0.0 && hi >= lo && count >= 1.0 && count == std::floor(count))) {
      throw std::invalid_argument(flag + ": expected lo:hi:count with 0 < lo <= hi, count >= 1");
    }
    grid = log_spaced_grid(lo, hi, static_cast<std::size_t>(count));
  } else {
    for (const auto& part : split(text, ',')) grid.push_back(parse_double(part, flag));
  }
  if (grid.empty()) throw std::invalid_argument(flag + ": empty grid");
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument(flag + ": grid must be nondecreasing");
  }
  return grid;
}

std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> out;
  for (const auto& part : split(text, ',')) {
    const double v = parse_double(part, flag);
    if (!(v >= 0.0) || v != std::floor(v)) {
      throw std::invalid_argument(flag + ": '" + part + "' is not a nonnegative integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw std::invalid_argument(flag + ": empty list");
  return out;
}

CommandOutput cmd_sample(const Options& o) {
  const auto a = sample_matrix(spec_of(o), o.n, root_of(o));
  json rows = json::array();
  Table table;
  for (std::size_t j = 0; j < o.N; ++j) table.header.push_back("x" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    std::vector<json> csv_row;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      row.push_back(a.matrix()(i, j));
      csv_row.emplace_back(a.matrix()(i, j));
    }
    rows.push_back(row);
    table.rows.push_back(std::move(csv_row));
  }
  return {{{"n", o.n}, {"N", o.N}, {"rows", rows}}, table, 0};
}

CommandOutput cmd_isotropy(const Options& o) {
  return {to_json(isotropy_report(spec_of(o), o.trials, root_of(o))), std::nullopt, 0};
}

CommandOutput cmd_tails_paouris(const Options& o) {
  const auto grid = grid_or(o.t_grid, "--t-grid", "1:4:12");
  return tail_output(check_paouris(spec_of(o), grid, o.trials, root_of(o), o.workers));
}

CommandOutput cmd_tails_proj(const Options& o) {
  const auto spec = spec_of(o);
  const auto grid = grid_or(o.t_grid, "--t-grid", "1:8:12");
  const auto model = sigma_model_of(o, spec);
  auto out = tail_output(check_projection_sup(spec, o.m, grid, o.trials, model, root_of(o), o.workers));
  out.result["sigma_model"] = sigma_model_json(model);
  return out;
}

CommandOutput cmd_tails_order(const Options& o) {
  const auto spec = spec_of(o);
  const auto grid = grid_or(o.t_grid, "--t-grid", "0.5:8:12");
  const auto model = sigma_model_of(o, spec);
  auto out = tail_output(
      check_order_stat(spec, o.ell, grid, o.trials, model, root_of(o), o.C, o.workers));
  out.result["sigma_model"] = sigma_model_json(model);
  return out;
}

CommandOutput cmd_tails_count(const Options& o) {
  const auto spec = spec_of(o);
  const auto model = sigma_model_of(o, spec);
  json result = to_json(
      check_count_moments(spec, o.t, o.p, o.trials, model, root_of(o), o.C, o.workers));
  result["sigma_model"] = sigma_model_json(model);
  return {result, std::nullopt, 0};
}

CommandOutput cmd_tails_weighted(const Options& o) {
  const auto grid = grid_or(o.t_grid, "--t-grid", "1:8:12");
  const Eigen::VectorXd x = weights_of(o);
  const auto report = check_weighted_sum(spec_of(o), o.n, x, o.m, o.ell, grid, o.trials,
                                         root_of(o), o.directions, o.workers);
  json result = to_json(report);
  const double b = x.cwiseAbs().maxCoeff();
  json branches = json::array();
  Table table;
  table.header = {"t", "first_exponent", "second_exponent", "projection_survival"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto [first, second] = weighted_branch_exponents(grid[i], b, o.m, o.N);
    branches.push_back({{"t", grid[i]}, {"first", first}, {"second", second}});
    table.rows.push_back({grid[i], first, second, report.projection.curve.survival[i]});
  }
  result["branch_exponents"] = branches;
  return {result, table, 0};
}

CommandOutput cmd_tails_akm(const Options& o) {
  const auto grid = grid_or(o.t_grid, "--t-grid", "1:8:12");
  AkmTailOptions opts;
  opts.exact = exact_method(o);
  opts.budget = o.budget;
  opts.restarts = o.restarts;
  opts.uniform_in_k = o.uniform_in_k;
  return tail_output(
      check_akm_tail(spec_of(o), o.n, o.k, o.m, grid, o.trials, root_of(o), opts, o.workers));
}

CommandOutput cmd_kls_rate(const Options& o) {
  std::vector<std::size_t> grid;
  if (o.n_grid.empty()) {
    for (std::size_t f : {1, 4, 16, 64}) grid.push_back(f * o.N);
  } else {
    grid = parse_count_list(o.n_grid, "--n-grid");
  }
  const auto report = check_kls_rate(spec_of(o), grid, o.trials, root_of(o), o.workers);
  Table table;
  table.header = {"n", "median", "fitted_C"};
  for (std::size_t r = 0; r < grid.size(); ++r) {
    table.rows.push_back({grid[r], report.medians[r], report.fitted_C_per_n[r]});
  }
  return {to_json(report), table, 0};
}

CommandOutput cmd_akm(const Options& o) {
  const auto a = sample_matrix(spec_of(o), o.n, root_of(o));
  const RngStream search = root_of(o).child(kSideStream);
  json result = {{"n", o.n}, {"N", o.N}, {"m", o.m}};
  if (o.profile) {
    json profile = json::array();
    if (exact_method(o)) {
      for (const auto& r : akm_profile(a.matrix(), o.m, o.budget, o.workers)) {
        profile.push_back(to_json(r));
      }
    } else {
      for (std::size_t k = 1; k <= o.n; ++k) {
        profile.push_back(to_json(akm_lower(a.matrix(), k, o.m, o.restarts, search.child(k))));
      }
    }
    result["profile"] = profile;
  } else {
    const auto r = exact_method(o) ? akm_exact(a.matrix(), o.k, o.m, o.budget, o.workers)
                                   : akm_lower(a.matrix(), o.k, o.m, o.restarts, search);
    result["k"] = o.k;
    result["akm"] = to_json(r);
    result["lambda_km"] = lambda_km(o.k, o.m, o.n, o.N);
  }
  return {result, std::nullopt, 0};
}

CommandOutput cmd_delta(const Options& o) {
  const auto a = sample_matrix(spec_of(o), o.n, root_of(o));
  const auto r = exact_method(o)
                     ? delta_m_exact(a.matrix(), o.m, o.budget, o.workers)
                     : delta_m_lower(a.matrix(), o.m, o.restarts, root_of(o).child(kSideStream));
  return {{{"n", o.n}, {"N", o.N}, {"m", o.m}, {"rip", to_json(r)}}, std::nullopt, 0};
}

CommandOutput cmd_thresholds(const Options& o) {
  if (o.n == 0 || o.N == 0 || o.m == 0 || o.m > o.N || o.k == 0 || o.k > o.n) {
    throw std::invalid_argument("--k/--m: need 1 <= k <= n and 1 <= m <= N");
  }
  json result;
  result["lambda_km"] = lambda_km(o.k, o.m, o.n, o.N);
  result["lambda_m"] = lambda_m(o.m, o.n, o.N);
  const auto kp = k_prime(o.m, o.n, o.N);
  result["k_prime"] = kp ? json(*kp) : json(nullptr);
  result["b_m"] = rip_b_m(o.m, o.n, o.N);
  std::vector<double> zs;
  for (double z = 1.0; z <= static_cast<double>(o.N); z *= 2.0) zs.push_back(z);
  zs.push_back(static_cast<double>(o.m));
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  json g_table = json::array();
  Table table;
  table.header = {"z", "g"};
  for (double z : zs) {
    const double g = g_function(z, o.m, o.N);
    g_table.push_back({{"z", z}, {"g", g}});
    table.rows.push_back({z, g});
  }
  result["g_table"] = g_table;
  try {
    result["block_sizes"] = to_json(choose_block_sizes(o.k, o.m, o.n, o.N));
  } catch (const std::invalid_argument& e) {
    result["block_sizes"] = nullptr;
    result["block_sizes_note"] = e.what();
  }
  return {result, table, 0};
}

CommandOutput cmd_net_audit(const Options& o) {
  if (o.k == 0 || o.k > o.n) throw std::invalid_argument("--k: need 1 <= k <= n");
  const auto sizes = choose_block_sizes(o.k, o.m, o.n, o.N);
  const RngStream root = root_of(o);
  std::vector<NetAudit> audits(o.trials);
  parallel_for(o.trials, o.workers, [&](std::size_t j) {
    auto eng = root.child(j).engine();
    std::vector<std::size_t> idx(o.n);
    for (std::size_t i = 0; i < o.n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < o.k; ++i) std::swap(idx[i], idx[i + uniform_index(eng, o.n - i)]);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(o.n));
    for (std::size_t i = 0; i < o.k; ++i) {
      x(static_cast<Eigen::Index>(idx[i])) = standard_normal(eng);
    }
    x.normalize();
    audits[j] = audit_net_projection(x, sparse_net_project(x, sizes, o.n), sizes);
  });
  const double distance_bound = static_cast<double>(o.k) / (2.0 * static_cast<double>(o.n));
  std::size_t distance = 0, weight = 0, overlap = 0, support = 0;
  double max_distance = 0.0, max_weight = 0.0;
  for (const auto& a : audits) {
    distance += a.distance > distance_bound;
    weight += a.sup_weight > 4.0;
    overlap += !a.disjoint;
    support += !a.sizes_ok;
    max_distance = std::max(max_distance, a.distance);
    max_weight = std::max(max_weight, a.sup_weight);
  }
  json result = {{"trials", o.trials},
                 {"distance_bound", distance_bound},
                 {"weight_bound", 4.0},
                 {"max_distance", max_distance},
                 {"max_weight", max_weight},
                 {"violations",
                  {{"distance", distance},
                   {"weight", weight},
                   {"overlap", overlap},
                   {"support", support}}},
                 {"total_violations", distance + weight + overlap + support},
                 {"block_sizes", to_json(sizes)}};
  return {result, std::nullopt, 0};
}

CommandOutput cmd_rip_cert(const Options& o) {
  const auto spec = spec_of(o);
  const RngStream root = root_of(o);
  const double b_m = rip_b_m(o.m, o.n, o.N);
  double B = 1.0;
  std::string source = "flag";
  if (o.B) {
    B = *o.B;
  } else {
    // B = C1 log(n / b_m), floored at 1 where the formula drops below it.
    const double proof = o.C * std::log(static_cast<double>(o.n) / b_m);
    B = std::isfinite(proof) && proof >= 1.0 ? proof : 1.0;
    source = B == proof ? "proof_choice" : "proof_choice_floored";
  }
  const auto mean = estimate_akm_mean_sq(spec, o.n, o.m, o.replicas, root.child(1), o.budget,
                                         o.workers);
  RipCertificateOptions opts;
  opts.budget = o.budget;
  opts.cached_mean_sq = &mean;
  opts.heuristic_restarts = o.restarts;
  opts.workers = o.workers;
  json certs = json::array();
  std::size_t sound = 0, exact = 0;
  Table table;
  table.header = {"trial", "k_star", "bound", "exact_delta", "sound"};
  for (std::size_t j = 0; j < o.trials; ++j) {
    const RngStream matrix_stream = root.child(0).child(j);
    auto cert = rip_certificate(sample_matrix(spec, o.n, matrix_stream), o.m, o.theta, B,
                                o.replicas, matrix_stream, opts);
    cert.replicas = o.replicas;
    exact += cert.exact_delta.has_value();
    sound += cert.exact_delta.has_value() && cert.sound;
    table.rows.push_back({j, cert.k_star, cert.bound,
                          cert.exact_delta ? json(*cert.exact_delta) : json(), cert.sound ? 1 : 0});
    certs.push_back(to_json(cert));
  }
  json result = {{"B", B},
                 {"B_source", source},
                 {"b_m", b_m},
                 {"akm_mean_sq", mean},
                 {"trials", o.trials},
                 {"exact_count", exact},
                 {"sound_count", sound},
                 {"certificates", certs}};
  return {result, table, 0};
}

CommandOutput cmd_rip_admissible(const Options& o) {
  const auto r = rip_admissible_m(o.n, o.N, o.theta, o.c, o.C);
  json result = to_json(r);
  result["lhs"] = r.m > 0 ? json(rip_admissibility_lhs(r.m, o.n, o.N)) : json(nullptr);
  result["rhs"] = rip_admissibility_rhs(o.n, o.theta, o.c);
  return {result, std::nullopt, 0};
}

CommandOutput cmd_recover(const Options& o) {
  const auto spec = spec_of(o);
  const RngStream root = root_of(o);
  BasisPursuitOptions bp;
  bp.tol = o.tol;
  bp.max_iter = o.max_iter;
  std::vector<RecoveryTrial> trials(o.trials);
  parallel_for(o.trials, o.workers, [&](std::size_t j) {
    trials[j] = recovery_trial(spec, o.n, o.N, o.s, root.child(j), bp);
  });
  std::size_t successes = 0, stalled = 0;
  double worst = 0.0;
  json detail = json::array();
  Table table;
  table.header = {"trial", "success", "rel_error", "residual", "iterations"};
  for (std::size_t j = 0; j < trials.size(); ++j) {
    const auto& t = trials[j];
    successes += t.success;
    stalled += t.reason == "solver did not converge within max_iter";
    worst = std::max(worst, t.rel_error);
    detail.push_back({{"success", t.success},
                      {"rel_error", t.rel_error},
                      {"residual", t.residual},
                      {"iterations", t.iterations},
                      {"reason", t.reason}});
    table.rows.push_back({j, t.success ? 1 : 0, t.rel_error, t.residual, t.iterations});
  }
  const double rate =
      o.trials ? static_cast<double>(successes) / static_cast<double>(o.trials) : 0.0;
  json result = {{"trials", o.trials},
                 {"successes", successes},
                 {"success_rate", rate},
                 {"stderr", o.trials ? std::sqrt(rate * (1 - rate) / static_cast<double>(o.trials))
                                     : 0.0},
                 {"not_converged", stalled},
                 {"max_rel_error", worst},
                 {"tolerance", kRecoveryTolerance},
                 {"trial_results", detail}};
  return {result, table, stalled > 0 ? 3 : 0};
}

CommandOutput cmd_phase(const Options& o) {
  const auto grid = parse_count_list(o.s_grid.empty() ? "0,2,4,8,16" : o.s_grid, "--s-grid");
  BasisPursuitOptions bp;
  bp.tol = o.tol;
  bp.max_iter = o.max_iter;
  const auto d = phase_diagram(spec_of(o), o.n, o.N, grid, o.trials, root_of(o), o.theta, o.c,
                               bp, o.workers);
  Table table;
  table.header = {"sparsity", "rate", "stderr"};
  for (std::size_t c = 0; c < grid.size(); ++c) {
    table.rows.push_back({grid[c], d.rates[c], d.stderrs[c]});
  }
  return {to_json(d), table, 0};
}

}  // namespace lcrip::cli
