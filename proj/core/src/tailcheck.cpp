#include "lcrip/tailcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace lcrip {

SurvivalCurve survival_curve(std::span<const double> samples,
                             std::span<const double> thresholds, std::string statistic_id,
                             std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("survival curve needs samples");
  if (thresholds.empty()) throw std::invalid_argument("survival curve needs thresholds");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("thresholds must be sorted ascending");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  SurvivalCurve curve;
  curve.statistic_id = std::move(statistic_id);
  curve.seed = seed;
  curve.trials = sorted.size();
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  const double total = static_cast<double>(sorted.size());
  for (double t : thresholds) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    curve.survival.push_back(static_cast<double>(sorted.size() - static_cast<std::size_t>(below)) /
                             total);
  }
  return curve;
}

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count == 0) {
    throw std::invalid_argument("log grid needs 0 < lo <= hi and count >= 1");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

double empirical_quantile(std::span<const double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  const auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(rank, 1) - 1);
  std::nth_element(sorted.begin(), nth, sorted.end());
  return *nth;
}

namespace {

bool is_used(const std::vector<bool>& use, std::size_t i) {
  return use.empty() || (i < use.size() && use[i]);
}

void finish(CalibrationReport& report) {
  report.fitted_C = 0.0;
  for (std::size_t i = 0; i < report.per_threshold_C.size(); ++i) {
    if (report.used[i]) report.fitted_C = std::max(report.fitted_C, report.per_threshold_C[i]);
  }
  report.pass = std::isfinite(report.fitted_C);
}

}  // namespace

CalibrationReport fit_scaled_bound(std::string bound_id, std::span<const double> samples,
                                   std::span<const double> scale,
                                   std::span<const double> allowed,
                                   const std::vector<bool>& use) {
  if (samples.empty()) throw std::invalid_argument("calibration needs samples");
  if (scale.size() != allowed.size()) {
    throw std::invalid_argument("scale and allowed probability grids differ in length");
  }
  std::vector<double> desc(samples.begin(), samples.end());
  std::sort(desc.begin(), desc.end(), std::greater<>());
  const double total = static_cast<double>(desc.size());

  CalibrationReport report;
  report.bound_id = std::move(bound_id);
  for (std::size_t i = 0; i < scale.size(); ++i) {
    const bool in = is_used(use, i);
    report.used.push_back(in);
    if (!in) {
      report.per_threshold_C.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    if (!(scale[i] > 0.0)) throw std::invalid_argument("threshold scale must be positive");
    const double q = std::floor(std::max(allowed[i], 0.0) * total);
    double c = 0.0;
    if (q < total) c = std::max(desc[static_cast<std::size_t>(q)], 0.0) / scale[i];
    report.per_threshold_C.push_back(c);
  }
  finish(report);
  return report;
}

CalibrationReport fit_exponent_bound(
    std::string bound_id, const SurvivalCurve& curve,
    const std::function<double(std::size_t, double)>& constant_for,
    const std::vector<bool>& use) {
  CalibrationReport report;
  report.bound_id = std::move(bound_id);
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    const bool in = is_used(use, i);
    report.used.push_back(in);
    if (!in) {
      report.per_threshold_C.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double p = curve.survival[i];
    const double level = p > 0.0 ? -std::log(p) : std::numeric_limits<double>::infinity();
    report.per_threshold_C.push_back(constant_for(i, level));
  }
  finish(report);
  return report;
}

double log_survival_slope(std::span<const double> samples, double t_from,
                          std::size_t min_exceed, std::size_t points) {
  if (samples.empty() || min_exceed == 0 || points < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() < min_exceed) return std::numeric_limits<double>::quiet_NaN();
  const double t_to = sorted[sorted.size() - min_exceed];
  if (!(t_to > t_from)) return std::numeric_limits<double>::quiet_NaN();
  const double total = static_cast<double>(sorted.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = t_from + (t_to - t_from) * static_cast<double>(i) /
                                  static_cast<double>(points - 1);
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    const double y = std::log(static_cast<double>(sorted.size() - static_cast<std::size_t>(below)) / total);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  const double dp = static_cast<double>(points);
  return (dp * sxy - sx * sy) / (dp * sxx - sx * sx);
}

std::size_t convexity_violations(const SurvivalCurve& curve) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    if (curve.survival[i] > 0.0) pts.emplace_back(curve.thresholds[i], std::log(curve.survival[i]));
  }
  std::size_t count = 0;
  for (std::size_t i = 2; i < pts.size(); ++i) {
    const double d1 = (pts[i - 1].second - pts[i - 2].second) / (pts[i - 1].first - pts[i - 2].first);
    const double d2 = (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
    if (d2 < d1 - 1e-12) ++count;
  }
  return count;
}

double TailReport::diagnostic(const std::string& name) const {
  for (const auto& [key, value] : diagnostics) {
    if (key == name) return value;
  }
  throw std::out_of_range("no diagnostic named " + name);
}

}  // namespace lcrip
