#include "lcrip/sparse_norms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lcrip/errors.hpp"
#include "lcrip/operator_norm.hpp"
#include "lcrip/parallel.hpp"

namespace lcrip {
namespace {

constexpr double kEigenTol = 1e-13;

double top_eigen_2x2(double a, double b, double c) {
  const double half_diff = 0.5 * (a - c);
  return 0.5 * (a + c) + std::hypot(half_diff, b);
}

double top_eigen(const Eigen::MatrixXd& gram) {
  const Eigen::Index d = gram.rows();
  if (d == 1) return gram(0, 0);
  if (d == 2) return top_eigen_2x2(gram(0, 0), gram(0, 1), gram(1, 1));
  Eigen::VectorXd vec;
  return top_eigenpair_psd(gram, kEigenTol, vec);
}

void check_budget(double count, std::uint64_t budget, const char* what,
                  const char* fallback) {
  if (count > static_cast<double>(budget)) {
    throw BudgetExceeded(std::string(what) + " needs " + std::to_string(count) +
                         " evaluations, over the budget of " +
                         std::to_string(budget) + "; use " + fallback);
  }
}

void check_akm_args(const Eigen::MatrixXd& a, std::size_t k, std::size_t m) {
  if (a.size() == 0) throw std::invalid_argument("A_{k,m} of an empty matrix");
  if (k == 0 || k > static_cast<std::size_t>(a.rows())) {
    throw std::invalid_argument("k must satisfy 1 <= k <= n");
  }
  if (m == 0 || m > static_cast<std::size_t>(a.cols())) {
    throw std::invalid_argument("m must satisfy 1 <= m <= N");
  }
}

// Squared norm of A(J, I) given the k x N row block and its column Gram.
double block_norm_sq(const Eigen::MatrixXd& block, const Eigen::MatrixXd& col_gram,
                     const IndexSet& cols) {
  const auto m = static_cast<Eigen::Index>(cols.size());
  const Eigen::Index k = block.rows();
  if (m == 1) return col_gram(cols[0], cols[0]);
  if (m == 2) {
    return top_eigen_2x2(col_gram(cols[0], cols[0]), col_gram(cols[0], cols[1]),
                         col_gram(cols[1], cols[1]));
  }
  if (m <= k) {
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) g(i, j) = col_gram(cols[i], cols[j]);
    }
    return top_eigen(g);
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t c : cols) {
    const auto col = block.col(static_cast<Eigen::Index>(c));
    g.noalias() += col * col.transpose();
  }
  return top_eigen(g);
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& a, const IndexSet& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = a.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

Eigen::MatrixXd select(const Eigen::MatrixXd& a, const IndexSet& rows,
                       const IndexSet& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          a(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

IndexSet identity_set(std::size_t k) {
  IndexSet s(k);
  std::iota(s.begin(), s.end(), std::size_t{0});
  return s;
}

// Indices of the `count` largest scores, ties to the lower index; sorted.
IndexSet top_indices(const Eigen::VectorXd& scores, std::size_t count) {
  IndexSet order = identity_set(static_cast<std::size_t>(scores.size()));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return scores(static_cast<Eigen::Index>(x)) > scores(static_cast<Eigen::Index>(y));
  });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

IndexSet random_subset(Philox4x32& eng, std::size_t n, std::size_t k) {
  IndexSet pool = identity_set(n);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(eng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Splits [0, total) into `parts` contiguous ranges.
std::vector<std::pair<std::uint64_t, std::uint64_t>> split_range(std::uint64_t total,
                                                                 unsigned parts) {
  parts = std::max(1U, parts);
  if (total < parts) parts = static_cast<unsigned>(std::max<std::uint64_t>(total, 1));
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  const std::uint64_t base = total / parts;
  const std::uint64_t extra = total % parts;
  std::uint64_t lo = 0;
  for (unsigned p = 0; p < parts; ++p) {
    const std::uint64_t hi = lo + base + (p < extra ? 1 : 0);
    out.emplace_back(lo, hi);
    lo = hi;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// A_{k,m}

SubmatrixResult akm_exact(const Eigen::MatrixXd& a, std::size_t k, std::size_t m,
                          std::uint64_t budget, unsigned workers) {
  check_akm_args(a, k, m);
  const auto n = static_cast<std::size_t>(a.rows());
  const auto big_n = static_cast<std::size_t>(a.cols());
  const double row_sets = binomial(n, k);
  const double col_sets = binomial(big_n, m);
  check_budget(row_sets * col_sets, budget, "exact A_{k,m}", "akm_lower");

  const auto ranges = split_range(static_cast<std::uint64_t>(row_sets), workers);
  std::vector<SubmatrixResult> partial(ranges.size());
  parallel_for(ranges.size(), workers, [&](std::size_t chunk) {
    auto [lo, hi] = ranges[chunk];
    SubmatrixResult best;
    best.value = -1.0;
    IndexSet rows = unrank_combination(lo, n, k);
    for (std::uint64_t r = lo; r < hi; ++r) {
      const Eigen::MatrixXd block = select_rows(a, rows);
      const Eigen::MatrixXd col_gram = block.transpose() * block;
      IndexSet cols = identity_set(m);
      do {
        const double v = block_norm_sq(block, col_gram, cols);
        ++best.evaluations;
        if (v > best.value) {
          best.value = v;
          best.rows = rows;
          best.cols = cols;
        }
      } while (next_combination(cols, big_n));
      next_combination(rows, n);
    }
    partial[chunk] = std::move(best);
  });

  SubmatrixResult out;
  out.value = -1.0;
  for (auto& p : partial) {
    out.evaluations += p.evaluations;
    if (p.value > out.value) {
      out.value = p.value;
      out.rows = std::move(p.rows);
      out.cols = std::move(p.cols);
    }
  }
  out.value = std::sqrt(std::max(out.value, 0.0));
  out.method = Method::Exact;
  return out;
}

SubmatrixResult akm_lower(const Eigen::MatrixXd& a, std::size_t k, std::size_t m,
                          std::size_t restarts, const RngStream& stream) {
  check_akm_args(a, k, m);
  if (restarts == 0) throw std::invalid_argument("akm_lower needs restarts >= 1");
  const auto n = static_cast<std::size_t>(a.rows());
  const auto big_n = static_cast<std::size_t>(a.cols());

  SubmatrixResult best;
  best.value = -1.0;
  best.method = Method::Heuristic;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto eng = stream.child(r).engine();
    IndexSet rows = random_subset(eng, n, k);
    IndexSet cols = random_subset(eng, big_n, m);
    double value = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
      const SingularTriplet trip = top_singular_triplet(select(a, rows, cols), kEigenTol);
      ++best.evaluations;
      value = trip.value;
      Eigen::VectorXd row_scores = Eigen::VectorXd::Zero(a.rows());
      for (std::size_t j = 0; j < m; ++j) {
        row_scores += trip.right(static_cast<Eigen::Index>(j)) *
                      a.col(static_cast<Eigen::Index>(cols[j]));
      }
      const IndexSet new_rows = top_indices(row_scores.cwiseAbs(), k);
      Eigen::VectorXd u = Eigen::VectorXd::Zero(a.cols());
      double unorm = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        unorm += row_scores(static_cast<Eigen::Index>(new_rows[i])) *
                 row_scores(static_cast<Eigen::Index>(new_rows[i]));
      }
      unorm = std::sqrt(unorm);
      if (unorm == 0.0) break;
      for (std::size_t i = 0; i < k; ++i) {
        const auto ri = static_cast<Eigen::Index>(new_rows[i]);
        u += (row_scores(ri) / unorm) * a.row(ri).transpose();
      }
      const IndexSet new_cols = top_indices(u.cwiseAbs(), m);
      if (new_rows == rows && new_cols == cols) break;
      rows = new_rows;
      cols = new_cols;
    }
    value = operator_norm(select(a, rows, cols), kEigenTol);
    if (value > best.value) {
      best.value = value;
      best.rows = rows;
      best.cols = cols;
    }
  }
  return best;
}

namespace {

struct ProfileEntry {
  double value_sq = -1.0;
  std::uint64_t col_rank = 0;  // index of the column set in lexicographic order
  double angle = 0.0;          // sweep direction (m = 2 only)
};

// Row order by |<a_j, v>| descending, ties to the lower index.
IndexSet sweep_order(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Eigen::VectorXd scores = (c * x + s * y).cwiseAbs();
  IndexSet order = identity_set(static_cast<std::size_t>(x.size()));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
    return scores(static_cast<Eigen::Index>(p)) > scores(static_cast<Eigen::Index>(q));
  });
  return order;
}

// For a fixed column pair, max over |J| = k of ||A(J, {c1, c2})||^2 equals
// the max over unit v of the sum of the k largest <a_j, v>^2, and the
// top-k set is constant on each cell of the arrangement of lines where
// |<a_j, v>| = |<a_l, v>|. Evaluating the top eigenvalue of the cell's
// Gram at one interior direction per cell is therefore exact.
void sweep_pair(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                std::uint64_t col_rank, std::vector<ProfileEntry>& best) {
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<double> angles;
  angles.reserve(n * (n - 1) + 1);
  angles.push_back(0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = j + 1; l < n; ++l) {
      for (double sign : {-1.0, 1.0}) {
        const double wx = x(static_cast<Eigen::Index>(j)) + sign * x(static_cast<Eigen::Index>(l));
        const double wy = y(static_cast<Eigen::Index>(j)) + sign * y(static_cast<Eigen::Index>(l));
        if (wx == 0.0 && wy == 0.0) continue;
        double theta = std::atan2(wy, wx) + 0.5 * M_PI;
        theta = std::fmod(theta, M_PI);
        if (theta < 0.0) theta += M_PI;
        angles.push_back(theta);
      }
    }
  }
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end()), angles.end());

  for (std::size_t c = 0; c < angles.size(); ++c) {
    const double next = c + 1 < angles.size() ? angles[c + 1] : angles[0] + M_PI;
    const double mid = 0.5 * (angles[c] + next);
    const IndexSet order = sweep_order(x, y, mid);
    double g00 = 0.0, g01 = 0.0, g11 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto r = static_cast<Eigen::Index>(order[k]);
      g00 += x(r) * x(r);
      g01 += x(r) * y(r);
      g11 += y(r) * y(r);
      const double v = top_eigen_2x2(g00, g01, g11);
      if (v > best[k].value_sq) best[k] = {v, col_rank, mid};
    }
  }
}

}  // namespace

std::vector<SubmatrixResult> akm_profile(const Eigen::MatrixXd& a, std::size_t m,
                                         std::uint64_t budget, unsigned workers) {
  check_akm_args(a, 1, m);
  const auto n = static_cast<std::size_t>(a.rows());
  const auto big_n = static_cast<std::size_t>(a.cols());
  std::vector<SubmatrixResult> out(n);

  if (m == 1) {
    for (std::size_t k = 0; k < n; ++k) out[k].value = -1.0;
    for (std::size_t c = 0; c < big_n; ++c) {
      const Eigen::VectorXd col = a.col(static_cast<Eigen::Index>(c));
      const IndexSet order = sweep_order(col, Eigen::VectorXd::Zero(col.size()), 0.0);
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double e = col(static_cast<Eigen::Index>(order[k]));
        acc += e * e;
        ++out[k].evaluations;
        if (acc > out[k].value) {
          out[k].value = acc;
          out[k].rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k + 1));
          std::sort(out[k].rows.begin(), out[k].rows.end());
          out[k].cols = {c};
        }
      }
    }
    for (auto& r : out) r.value = std::sqrt(r.value);
    return out;
  }

  if (m == 2) {
    const auto pairs = static_cast<std::uint64_t>(binomial(big_n, 2));
    check_budget(static_cast<double>(pairs), budget, "A_{k,2} profile", "akm_lower");
    const auto ranges = split_range(pairs, workers);
    std::vector<std::vector<ProfileEntry>> partial(ranges.size(),
                                                   std::vector<ProfileEntry>(n));
    parallel_for(ranges.size(), workers, [&](std::size_t chunk) {
      auto [lo, hi] = ranges[chunk];
      IndexSet cols = unrank_combination(lo, big_n, 2);
      for (std::uint64_t r = lo; r < hi; ++r) {
        sweep_pair(a.col(static_cast<Eigen::Index>(cols[0])),
                   a.col(static_cast<Eigen::Index>(cols[1])), r, partial[chunk]);
        next_combination(cols, big_n);
      }
    });
    for (std::size_t k = 0; k < n; ++k) {
      ProfileEntry best;
      for (const auto& p : partial) {
        if (p[k].value_sq > best.value_sq) best = p[k];
      }
      SubmatrixResult& res = out[k];
      res.value = std::sqrt(std::max(best.value_sq, 0.0));
      res.cols = unrank_combination(best.col_rank, big_n, 2);
      const IndexSet order =
          sweep_order(a.col(static_cast<Eigen::Index>(res.cols[0])),
                      a.col(static_cast<Eigen::Index>(res.cols[1])), best.angle);
      res.rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k + 1));
      std::sort(res.rows.begin(), res.rows.end());
      res.evaluations = pairs;
    }
    return out;
  }

  double total = 0.0;
  for (std::size_t k = 1; k <= n; ++k) total += binomial(n, k) * binomial(big_n, m);
  check_budget(total, budget, "A_{k,m} profile", "akm_lower");
  for (std::size_t k = 1; k <= n; ++k) out[k - 1] = akm_exact(a, k, m, budget, workers);
  return out;
}

// ---------------------------------------------------------------------------
// delta_m

double spectral_deviation(const Eigen::MatrixXd& gram, Extreme* which) {
  double top = 0.0;
  double bottom = 0.0;
  if (gram.rows() == 1) {
    top = bottom = gram(0, 0);
  } else if (gram.rows() == 2) {
    const double mean = 0.5 * (gram(0, 0) + gram(1, 1));
    const double radius = std::hypot(0.5 * (gram(0, 0) - gram(1, 1)), gram(0, 1));
    top = mean + radius;
    bottom = mean - radius;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    top = solver.eigenvalues().maxCoeff();
    bottom = solver.eigenvalues().minCoeff();
  }
  const double up = top - 1.0;
  const double down = 1.0 - bottom;
  if (which) *which = up >= down ? Extreme::TopEigen : Extreme::BottomEigen;
  return std::max(up, down);
}

namespace {

Eigen::MatrixXd normalized_gram(const Eigen::MatrixXd& a) {
  return (a.transpose() * a) / static_cast<double>(a.rows());
}

Eigen::MatrixXd principal(const Eigen::MatrixXd& g, const IndexSet& cols) {
  const auto m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = g(cols[i], cols[j]);
  }
  return out;
}

void check_delta_args(const Eigen::MatrixXd& a, std::size_t m) {
  if (a.size() == 0) throw std::invalid_argument("delta_m of an empty matrix");
  if (m == 0 || m > static_cast<std::size_t>(a.cols())) {
    throw std::invalid_argument("m must satisfy 1 <= m <= N");
  }
}

}  // namespace

RipResult delta_m_exact(const Eigen::MatrixXd& a, std::size_t m, std::uint64_t budget,
                        unsigned workers) {
  check_delta_args(a, m);
  const auto big_n = static_cast<std::size_t>(a.cols());
  const double subsets = binomial(big_n, m);
  check_budget(subsets, budget, "exact delta_m", "delta_m_lower");
  const Eigen::MatrixXd g = normalized_gram(a);

  const auto ranges = split_range(static_cast<std::uint64_t>(subsets), workers);
  std::vector<RipResult> partial(ranges.size());
  parallel_for(ranges.size(), workers, [&](std::size_t chunk) {
    auto [lo, hi] = ranges[chunk];
    RipResult best;
    best.delta = -1.0;
    IndexSet cols = unrank_combination(lo, big_n, m);
    for (std::uint64_t r = lo; r < hi; ++r) {
      Extreme which = Extreme::TopEigen;
      const double d = spectral_deviation(principal(g, cols), &which);
      ++best.evaluations;
      if (d > best.delta) {
        best.delta = d;
        best.cols = cols;
        best.extreme = which;
      }
      next_combination(cols, big_n);
    }
    partial[chunk] = std::move(best);
  });

  RipResult out;
  out.delta = -1.0;
  for (auto& p : partial) {
    out.evaluations += p.evaluations;
    if (p.delta > out.delta) {
      out.delta = p.delta;
      out.cols = std::move(p.cols);
      out.extreme = p.extreme;
    }
  }
  out.method = Method::Exact;
  return out;
}

namespace {

struct SubsetSearch {
  const Eigen::MatrixXd& g;
  std::uint64_t evaluations = 0;

  double value(const IndexSet& cols, Extreme* which = nullptr) {
    ++evaluations;
    return spectral_deviation(principal(g, cols), which);
  }

  // Adds the column that maximizes the deviation until |cols| = m.
  double extend(IndexSet& cols, std::size_t m) {
    const auto big_n = static_cast<std::size_t>(g.rows());
    double current = cols.empty() ? -1.0 : value(cols);
    while (cols.size() < m) {
      double best = -1.0;
      std::size_t best_j = big_n;
      for (std::size_t j = 0; j < big_n; ++j) {
        if (std::find(cols.begin(), cols.end(), j) != cols.end()) continue;
        IndexSet trial = cols;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), j), j);
        const double v = value(trial);
        if (v > best) {
          best = v;
          best_j = j;
        }
      }
      cols.insert(std::upper_bound(cols.begin(), cols.end(), best_j), best_j);
      current = best;
    }
    return current;
  }

  // Best-improvement single swaps until no swap helps.
  double improve(IndexSet& cols, double current) {
    const auto big_n = static_cast<std::size_t>(g.rows());
    for (int round = 0; round < 10000; ++round) {
      double best = current;
      IndexSet best_set;
      for (std::size_t p = 0; p < cols.size(); ++p) {
        for (std::size_t j = 0; j < big_n; ++j) {
          if (std::find(cols.begin(), cols.end(), j) != cols.end()) continue;
          IndexSet trial = cols;
          trial[p] = j;
          std::sort(trial.begin(), trial.end());
          const double v = value(trial);
          if (v > best) {
            best = v;
            best_set = std::move(trial);
          }
        }
      }
      if (best_set.empty() || !(best > current + 1e-15 * (1.0 + std::abs(current)))) break;
      cols = std::move(best_set);
      current = best;
    }
    return current;
  }
};

}  // namespace

RipResult delta_m_lower(const Eigen::MatrixXd& a, std::size_t m, std::size_t restarts,
                        const RngStream& stream, const IndexSet* seed) {
  check_delta_args(a, m);
  if (restarts == 0) throw std::invalid_argument("delta_m_lower needs restarts >= 1");
  const auto big_n = static_cast<std::size_t>(a.cols());
  if (seed) {
    if (seed->size() > m) throw std::invalid_argument("seed larger than m");
    for (std::size_t j : *seed) {
      if (j >= big_n) throw std::invalid_argument("seed index out of range");
    }
  }
  const Eigen::MatrixXd g = normalized_gram(a);
  SubsetSearch search{g};

  RipResult best;
  best.delta = -1.0;
  best.method = Method::Heuristic;
  for (std::size_t r = 0; r < restarts; ++r) {
    IndexSet cols;
    if (r == 0) {
      if (seed) {
        cols = *seed;
        std::sort(cols.begin(), cols.end());
      }
    } else {
      auto eng = stream.child(r).engine();
      cols = random_subset(eng, big_n, m);
    }
    double value = search.extend(cols, m);
    value = search.improve(cols, value);
    if (value > best.delta) {
      best.delta = value;
      best.cols = cols;
    }
  }
  spectral_deviation(principal(g, best.cols), &best.extreme);
  best.evaluations = search.evaluations;
  return best;
}

std::vector<RipResult> delta_m_lower_path(const Eigen::MatrixXd& a, std::size_t m_max,
                                          std::size_t restarts, const RngStream& stream) {
  check_delta_args(a, m_max);
  std::vector<RipResult> out;
  out.reserve(m_max);
  for (std::size_t m = 1; m <= m_max; ++m) {
    const IndexSet* seed = out.empty() ? nullptr : &out.back().cols;
    out.push_back(delta_m_lower(a, m, restarts, stream.child(m), seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// threshold formulas

std::optional<std::size_t> k_prime(std::size_t m, std::size_t n, std::size_t N) {
  if (m == 0 || m > N) throw std::invalid_argument("k' needs 1 <= m <= N");
  if (n == 0) throw std::invalid_argument("k' needs n >= 1");
  const double target =
      static_cast<double>(m) * std::log(M_E * static_cast<double>(N) / static_cast<double>(m));
  for (std::size_t k = 1; k <= n; ++k) {
    const double dk = static_cast<double>(k);
    if (dk * std::log(M_E * static_cast<double>(n) / dk) >= target) return k;
  }
  return std::nullopt;
}

double lambda_km(std::size_t k, std::size_t m, std::size_t n, std::size_t N) {
  if (k == 0 || k > n) throw std::invalid_argument("lambda_{k,m} needs 1 <= k <= n");
  if (m == 0 || m > N) throw std::invalid_argument("lambda_{k,m} needs 1 <= m <= N");
  const double dm = static_cast<double>(m);
  const double dk = static_cast<double>(k);
  const double big = static_cast<double>(std::max(N, n));
  return std::sqrt(std::log(std::log(3.0 * dm))) * std::sqrt(dm) * std::log(M_E * big / dm) +
         std::sqrt(dk) * std::log(M_E * static_cast<double>(n) / dk);
}

double lambda_m(std::size_t m, std::size_t n, std::size_t N) {
  if (m == 0 || m > N) throw std::invalid_argument("lambda_m needs 1 <= m <= N");
  if (n == 0) throw std::invalid_argument("lambda_m needs n >= 1");
  const double dm = static_cast<double>(m);
  const double big = static_cast<double>(std::max(N, n));
  return std::sqrt(std::log(std::log(3.0 * dm))) * std::sqrt(dm) /
         std::sqrt(std::log(3.0 * dm)) * std::log(M_E * big / dm);
}

double g_function(double z, std::size_t m, std::size_t N) {
  if (!(z > 0.0)) throw std::invalid_argument("g needs z > 0");
  if (m == 0 || m > N) throw std::invalid_argument("g needs 1 <= m <= N");
  const double dm = static_cast<double>(m);
  const double log_ratio = std::log(M_E * static_cast<double>(N) / dm);
  if (z < dm) {
    return std::sqrt(z * dm) / std::sqrt(std::log(M_E * M_E * dm / z)) * log_ratio;
  }
  return std::min(std::sqrt(z * dm) * log_ratio, dm * log_ratio * log_ratio);
}

// ---------------------------------------------------------------------------
// split inequality

SplitCheck split_inequality(const Eigen::MatrixXd& family) {
  const auto n = static_cast<std::size_t>(family.rows());
  if (n == 0 || n > 30) throw std::invalid_argument("split check needs 1 <= n <= 30");
  const Eigen::VectorXd total = family.colwise().sum().transpose();
  SplitCheck out;
  out.off_diagonal = total.squaredNorm() - family.rowwise().squaredNorm().sum();
  out.best_cut = 0.0;  // E empty
  Eigen::VectorXd inside = Eigen::VectorXd::Zero(family.cols());
  std::uint64_t mask = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < count; ++i) {
    const int bit = std::countr_zero(i);
    mask ^= std::uint64_t{1} << bit;
    if (mask & (std::uint64_t{1} << bit)) {
      inside += family.row(bit).transpose();
    } else {
      inside -= family.row(bit).transpose();
    }
    const double cut = inside.dot(total - inside);
    if (cut > out.best_cut) {
      out.best_cut = cut;
      out.best_mask = mask;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// eps-nets

Eigen::MatrixXd sphere_net(std::size_t m, double eps) {
  if (m == 0) throw std::invalid_argument("sphere net needs m >= 1");
  if (!(eps > 0.0 && eps < 2.0)) throw std::invalid_argument("sphere net needs 0 < eps < 2");
  if (m == 1) {
    Eigen::MatrixXd out(1, 2);
    out << 1.0, -1.0;
    return out;
  }
  // Template: normalized lattice points on the surface of [-1,1]^m. Radial
  // projection from outside the ball is 1-Lipschitz, so the template is a
  // rho-net of the sphere with rho = (h/2) sqrt(m - 1) for lattice step h.
  const double rho = eps / 4.0;
  const double h = 2.0 * rho / std::sqrt(static_cast<double>(m - 1));
  const auto steps = static_cast<std::size_t>(std::ceil(2.0 / h));
  const double per_face = std::pow(static_cast<double>(steps + 1), static_cast<double>(m - 1));
  if (2.0 * static_cast<double>(m) * per_face > 2e6) {
    throw BudgetExceeded("sphere net template too large; increase eps or lower m");
  }
  std::vector<Eigen::VectorXd> tmpl;
  const auto face_points = static_cast<std::size_t>(per_face);
  for (std::size_t axis = 0; axis < m; ++axis) {
    for (double sign : {1.0, -1.0}) {
      for (std::size_t code = 0; code < face_points; ++code) {
        Eigen::VectorXd p(static_cast<Eigen::Index>(m));
        std::size_t rest = code;
        for (std::size_t d = 0; d < m; ++d) {
          if (d == axis) {
            p(static_cast<Eigen::Index>(d)) = sign;
            continue;
          }
          const std::size_t level = rest % (steps + 1);
          rest /= steps + 1;
          p(static_cast<Eigen::Index>(d)) =
              -1.0 + 2.0 * static_cast<double>(level) / static_cast<double>(steps);
        }
        tmpl.push_back(p.normalized());
      }
    }
  }

  // Greedy farthest-point selection until every template point is within
  // eps - rho of a selected one.
  const double radius = eps - rho;
  const std::size_t count = tmpl.size();
  std::vector<double> dist(count, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> chosen;
  std::size_t next = 0;
  while (true) {
    const std::size_t current = next;
    chosen.push_back(current);
    double far = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      dist[i] = std::min(dist[i], (tmpl[i] - tmpl[current]).norm());
      if (dist[i] > far) {
        far = dist[i];
        next = i;
      }
    }
    if (far <= radius) break;
  }

  // Prune selected points whose covered template points are all covered
  // by another selected point.
  std::vector<int> cover(count, 0);
  std::vector<std::vector<std::size_t>> covers(chosen.size());
  for (std::size_t c = 0; c < chosen.size(); ++c) {
    for (std::size_t i = 0; i < count; ++i) {
      if ((tmpl[i] - tmpl[chosen[c]]).norm() <= radius) {
        covers[c].push_back(i);
        ++cover[i];
      }
    }
  }
  std::vector<bool> keep(chosen.size(), true);
  for (std::size_t c = chosen.size(); c-- > 0;) {
    const bool redundant = std::all_of(covers[c].begin(), covers[c].end(),
                                       [&](std::size_t i) { return cover[i] >= 2; });
    if (!redundant) continue;
    keep[c] = false;
    for (std::size_t i : covers[c]) --cover[i];
  }

  const auto kept = static_cast<Eigen::Index>(std::count(keep.begin(), keep.end(), true));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), kept);
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < chosen.size(); ++c) {
    if (keep[c]) out.col(col++) = tmpl[chosen[c]];
  }
  return out;
}

std::vector<Eigen::VectorXd> epsilon_net_sparse_sphere(std::size_t N, std::size_t m,
                                                       double eps, double cap) {
  if (m == 0 || m > N) throw std::invalid_argument("net needs 1 <= m <= N");
  if (!(eps > 0.0 && eps < 2.0)) throw std::invalid_argument("net needs 0 < eps < 2");
  const double bound =
      binomial(N, m) * std::pow(1.0 + 2.0 / eps, static_cast<double>(m));
  if (bound > cap) {
    throw BudgetExceeded("net size bound " + std::to_string(bound) + " exceeds cap " +
                         std::to_string(cap));
  }
  const Eigen::MatrixXd tmpl = sphere_net(m, eps);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(binomial(N, m)) * static_cast<std::size_t>(tmpl.cols()));
  IndexSet support = identity_set(m);
  do {
    for (Eigen::Index c = 0; c < tmpl.cols(); ++c) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
      for (std::size_t j = 0; j < m; ++j) {
        v(static_cast<Eigen::Index>(support[j])) = tmpl(static_cast<Eigen::Index>(j), c);
      }
      out.push_back(std::move(v));
    }
  } while (next_combination(support, N));
  return out;
}

}  // namespace lcrip
