#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {
namespace {

void recurse(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (cur.size() == k) {
    fn(cur);
    return;
  }
  for (std::size_t i = start; i + (k - cur.size()) <= n; ++i) {
    cur.push_back(i);
    recurse(n, k, i + 1, cur, fn);
    cur.pop_back();
  }
}

// Simpson's rule on [lo, hi] with an even number of panels.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (hi - lo) / static_cast<double>(panels);
  double acc = f(lo) + f(hi);
  for (std::size_t i = 1; i < panels; ++i) {
    acc += (i % 2 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
  }
  return acc * h / 3.0;
}

}  // namespace

void for_each_subset(std::size_t n, std::size_t k,
                     const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> cur;
  recurse(n, k, 0, cur, fn);
}

double svd_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double brute_akm(const Eigen::MatrixXd& a, std::size_t k, std::size_t m) {
  double best = 0.0;
  const auto rows = static_cast<std::size_t>(a.rows());
  const auto cols = static_cast<std::size_t>(a.cols());
  for_each_subset(rows, k, [&](const std::vector<std::size_t>& j) {
    for_each_subset(cols, m, [&](const std::vector<std::size_t>& i) {
      Eigen::MatrixXd sub(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
          sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              a(static_cast<Eigen::Index>(j[r]), static_cast<Eigen::Index>(i[c]));
        }
      }
      best = std::max(best, svd_norm(sub));
    });
  });
  return best;
}

double brute_top_m(std::span<const double> x, std::size_t m) {
  double best = 0.0;
  for_each_subset(x.size(), m, [&](const std::vector<std::size_t>& idx) {
    double acc = 0.0;
    for (std::size_t i : idx) acc += x[i] * x[i];
    best = std::max(best, acc);
  });
  return std::sqrt(best);
}

double gram_deviation(const Eigen::MatrixXd& a) {
  const double n = static_cast<double>(a.rows());
  Eigen::MatrixXd dev = a.transpose() * a / n;
  dev -= Eigen::MatrixXd::Identity(a.cols(), a.cols());
  return svd_norm(dev);
}

double brute_delta_m(const Eigen::MatrixXd& a, std::size_t m) {
  double best = 0.0;
  for_each_subset(static_cast<std::size_t>(a.cols()), m, [&](const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(m));
    for (std::size_t c = 0; c < m; ++c) {
      sub.col(static_cast<Eigen::Index>(c)) = a.col(static_cast<Eigen::Index>(idx[c]));
    }
    best = std::max(best, gram_deviation(sub));
  });
  return best;
}

LpOptimum l1_min_by_supports(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  LpOptimum best;
  best.l1 = std::numeric_limits<double>::infinity();
  const auto rows = static_cast<std::size_t>(a.rows());
  const auto cols = static_cast<std::size_t>(a.cols());
  if (y.norm() == 0.0) {
    best.x = Eigen::VectorXd::Zero(a.cols());
    best.l1 = 0.0;
    best.feasible = true;
    return best;
  }
  for (std::size_t size = 1; size <= std::min(rows, cols); ++size) {
    for_each_subset(cols, size, [&](const std::vector<std::size_t>& idx) {
      Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(size));
      for (std::size_t c = 0; c < size; ++c) {
        sub.col(static_cast<Eigen::Index>(c)) = a.col(static_cast<Eigen::Index>(idx[c]));
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) <= 1e-10 * sv(0)) return;
      const Eigen::VectorXd w = svd.solve(y);
      if ((sub * w - y).norm() > 1e-10 * (1.0 + y.norm())) return;
      const double l1 = w.lpNorm<1>();
      if (l1 < best.l1) {
        best.l1 = l1;
        best.x = Eigen::VectorXd::Zero(a.cols());
        for (std::size_t c = 0; c < size; ++c) {
          best.x(static_cast<Eigen::Index>(idx[c])) = w(static_cast<Eigen::Index>(c));
        }
        best.feasible = true;
      }
    });
  }
  return best;
}

double order_stat_survival_beta(double t, std::size_t ell, std::size_t N) {
  if (t <= 0.0) return 1.0;
  const double alpha = static_cast<double>(N - ell + 1);
  const double beta = static_cast<double>(ell);
  const double log_norm = std::lgamma(alpha + beta) - std::lgamma(alpha) - std::lgamma(beta);
  const double lo = 1.0 - std::exp(-std::sqrt(2.0) * t);
  auto density = [&](double u) {
    if (u <= 0.0 || u >= 1.0) {
      if (u >= 1.0 && beta == 1.0) return std::exp(log_norm);
      if (u <= 0.0 && alpha == 1.0) return std::exp(log_norm);
      return 0.0;
    }
    return std::exp(log_norm + (alpha - 1.0) * std::log(u) + (beta - 1.0) * std::log1p(-u));
  };
  return std::clamp(simpson(density, lo, 1.0, 200000), 0.0, 1.0);
}

double binomial_moment(std::size_t N, double q, double p) {
  double acc = 0.0;
  const double dn = static_cast<double>(N);
  for (std::size_t k = 1; k <= N; ++k) {
    const double dk = static_cast<double>(k);
    const double log_pmf = std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) -
                           std::lgamma(dn - dk + 1.0) + dk * std::log(q) +
                           (dn - dk) * std::log1p(-q);
    acc += std::exp(log_pmf) * std::pow(dk, p);
  }
  return acc;
}

double laplace_abs_moment(double p) {
  // |E| has density sqrt2 exp(-sqrt2 t) on t > 0.
  auto f = [&](double t) { return std::pow(t, p) * std::sqrt(2.0) * std::exp(-std::sqrt(2.0) * t); };
  return std::pow(simpson(f, 0.0, 60.0, 400000), 1.0 / p);
}

double laplace_psi1() {
  auto mgf = [](double c) {
    auto f = [&](double t) {
      return std::exp(t / c) * std::sqrt(2.0) * std::exp(-std::sqrt(2.0) * t);
    };
    return simpson(f, 0.0, 400.0, 400000);
  };
  double lo = 1.0, hi = 4.0;  // mgf(lo) > 2 > mgf(hi)
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mgf(mid) > 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double l1_ball_coordinate_variance_2d(std::size_t cells) {
  const double h = 2.0 / static_cast<double>(cells);
  double area = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double x = -1.0 + (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < cells; ++j) {
      const double y = -1.0 + (static_cast<double>(j) + 0.5) * h;
      if (std::abs(x) + std::abs(y) <= 1.0) {
        area += h * h;
        second += x * x * h * h;
      }
    }
  }
  return second / area;
}

}  // namespace oracle
