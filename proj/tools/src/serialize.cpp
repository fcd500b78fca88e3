#include "serialize.hpp"

#include <cmath>

namespace lcrip::cli {

namespace {

// Non-finite values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

const char* method_name(Method m) { return m == Method::Exact ? "exact" : "heuristic"; }

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i].is_string()) {
        out << row[i].get<std::string>();
      } else if (!row[i].is_null()) {
        out << row[i].dump();
      }
    }
    out << '\n';
  }
}

json to_json(const IsotropyReport& r) {
  return {{"trials", r.trials},
          {"mean_norm", number(r.mean_norm)},
          {"max_abs_mean", number(r.max_abs_mean)},
          {"max_cov_deviation", number(r.max_cov_deviation)},
          {"psi1_estimate", number(r.psi1_estimate)}};
}

json to_json(const SurvivalCurve& c) {
  return {{"statistic_id", c.statistic_id},
          {"thresholds", numbers(c.thresholds)},
          {"survival", numbers(c.survival)},
          {"trials", c.trials},
          {"seed", c.seed}};
}

json to_json(const CalibrationReport& c) {
  json used = json::array();
  for (bool u : c.used) used.push_back(u);
  return {{"bound_id", c.bound_id},
          {"fitted_C", number(c.fitted_C)},
          {"per_threshold_C", numbers(c.per_threshold_C)},
          {"used", used},
          {"slope", number(c.slope)},
          {"convexity_violations", c.convexity_violations},
          {"pass", c.pass}};
}

json to_json(const TailReport& r) {
  json extra = json::array();
  for (const auto& e : r.extra) extra.push_back(to_json(e));
  json diagnostics = json::object();
  for (const auto& [name, value] : r.diagnostics) diagnostics[name] = number(value);
  json config = json::object();
  for (const auto& [name, value] : r.config) config[name] = value;
  return {{"check_id", r.check_id},
          {"curve", to_json(r.curve)},
          {"calibration", to_json(r.calibration)},
          {"extra", extra},
          {"diagnostics", diagnostics},
          {"check_config", config},
          {"lower_bound_statistic", r.lower_bound_statistic}};
}

json to_json(const CountMomentsReport& r) {
  return {{"t", r.t},
          {"p", r.p},
          {"trials", r.trials},
          {"lhs", number(r.lhs)},
          {"rhs_base", number(r.rhs_base)},
          {"fitted_C", number(r.fitted_C)},
          {"mean_count", number(r.mean_count)},
          {"admissibility_C", r.admissibility_C}};
}

json to_json(const WeightedSumReport& r) {
  json rows = json::array();
  for (const auto& row : r.sigma_rows) {
    rows.push_back({{"p", row.p},
                    {"sigma_estimate", number(row.sigma_estimate)},
                    {"envelope", number(row.envelope)},
                    {"ratio", number(row.ratio)}});
  }
  return {{"sigma_rows", rows},
          {"order_stat", to_json(r.order_stat)},
          {"projection", to_json(r.projection)},
          {"small_weight_branch", r.small_weight_branch}};
}

json to_json(const KlsReport& r) {
  return {{"n_grid", r.n_grid},
          {"medians", numbers(r.medians)},
          {"fitted_C_per_n", numbers(r.fitted_C_per_n)},
          {"fitted_C", number(r.fitted_C)},
          {"slope", number(r.slope)}};
}

json to_json(const SubmatrixResult& r) {
  return {{"value", number(r.value)},
          {"rows", r.rows},
          {"cols", r.cols},
          {"method", method_name(r.method)},
          {"evaluations", r.evaluations}};
}

json to_json(const RipResult& r) {
  return {{"delta", number(r.delta)},
          {"cols", r.cols},
          {"extreme", r.extreme == Extreme::TopEigen ? "top" : "bottom"},
          {"method", method_name(r.method)},
          {"evaluations", r.evaluations}};
}

json to_json(const BlockSizes& b) {
  return {{"s", b.s}, {"k", b.k}, {"ell", numbers(b.ell)}};
}

json to_json(const RipAdmissibility& r) {
  return {{"m", r.m},
          {"b_m", number(r.b_m)},
          {"b_m_small", r.b_m_small},
          {"sparsity_condition", r.sparsity_condition},
          {"B", number(r.B)},
          {"C1", r.C1},
          {"diagnostic", r.diagnostic}};
}

json to_json(const RipCertificate& c) {
  return {{"m", c.m},
          {"theta", c.theta},
          {"B", c.B},
          {"n", c.n},
          {"k_star", c.k_star},
          {"akm_value", number(c.akm_value)},
          {"akm_mean_sq_estimate", number(c.akm_mean_sq_estimate)},
          {"replicas", c.replicas},
          {"bound", number(c.bound)},
          {"exact_delta", c.exact_delta ? number(*c.exact_delta) : json(nullptr)},
          {"sound", c.sound},
          {"truncation_admissible", c.truncation_admissible},
          {"probability_floor", number(c.probability_floor)},
          {"akm_method", method_name(c.akm_method)},
          {"akm_profile", numbers(c.akm_profile)}};
}

json to_json(const PhaseDiagram& d) {
  return {{"ensemble", d.ensemble},
          {"n", d.n},
          {"N", d.N},
          {"sparsity_grid", d.sparsity_grid},
          {"trials_per_cell", d.trials_per_cell},
          {"rates", numbers(d.rates)},
          {"stderrs", numbers(d.stderrs)},
          {"master_seed", d.master_seed},
          {"stream_index", d.stream_index},
          {"admissible", to_json(d.admissible)},
          {"monotone_violations", d.monotone_violations},
          {"transition", d.transition ? json(*d.transition) : json(nullptr)}};
}

Table curve_table(const TailReport& r) {
  Table t;
  t.header = {"threshold", "survival", "per_threshold_C", "used"};
  for (std::size_t i = 0; i < r.curve.thresholds.size(); ++i) {
    const auto& cal = r.calibration;
    t.rows.push_back({number(r.curve.thresholds[i]), number(r.curve.survival[i]),
                      i < cal.per_threshold_C.size() ? number(cal.per_threshold_C[i]) : json(),
                      i < cal.used.size() ? json(cal.used[i] ? 1 : 0) : json()});
  }
  return t;
}

}  // namespace lcrip::cli
