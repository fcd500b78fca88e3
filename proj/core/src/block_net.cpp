#include "lcrip/block_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lcrip/sparse_norms.hpp"

namespace lcrip {
namespace {

double h_fn(double z, double n) { return z * std::log(M_E * n / z); }

// Root of h(z) = target on (0, n], h increasing there; target < n.
double h_inverse(double target, double n) {
  double lo = 0.0;
  double hi = n;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (h_fn(mid, n) < target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

BlockSizes choose_block_sizes(std::size_t k, std::size_t m, std::size_t n, std::size_t N) {
  if (n == 0 || n > N) throw std::invalid_argument("block sizes need 1 <= n <= N");
  if (k == 0 || k > n) throw std::invalid_argument("block sizes need 1 <= k <= n");
  if (m == 0 || m > N) throw std::invalid_argument("block sizes need 1 <= m <= N");
  if (const auto kp = k_prime(m, n, N); kp && k > *kp) {
    throw std::invalid_argument("block sizes need k <= k' = " + std::to_string(*kp));
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);

  BlockSizes out;
  out.ell.push_back(1.0);
  while (out.ell.back() < dm) {
    if (out.ell.size() > 200) throw std::logic_error("block size recursion did not terminate");
    const double target = 10.0 * g_function(out.ell.back(), m, N);
    if (target >= dn) {
      out.ell.push_back(dm);
      break;
    }
    const double next = h_inverse(target, dn);
    if (!(next > out.ell.back())) {
      throw std::logic_error("block size recursion stalled at index " +
                             std::to_string(out.ell.size()));
    }
    out.ell.push_back(next);
  }
  out.s = out.ell.size();
  out.k.resize(out.s + 1);
  out.k[0] = k;
  for (std::size_t i = 2; i <= out.s + 1; ++i) {
    const double ell = out.ell[out.s + 1 - i];
    out.k[i - 1] = std::min(m, static_cast<std::size_t>(std::ceil(ell - 1e-12)));
  }
  const auto problems = block_size_violations(out, m, n, N);
  if (!problems.empty()) throw std::logic_error("block sizes: " + problems.front());
  return out;
}

std::vector<std::string> block_size_violations(const BlockSizes& sizes, std::size_t m,
                                               std::size_t n, std::size_t N) {
  std::vector<std::string> out;
  const std::size_t s = sizes.s;
  if (sizes.k.size() != s + 1 || s == 0) {
    out.push_back("expected s + 1 sizes");
    return out;
  }
  const double dn = static_cast<double>(n);
  if (sizes.k[s] != 1) out.push_back("k_{s+1} = " + std::to_string(sizes.k[s]) + " != 1");
  const double floor_size = std::pow(static_cast<double>(m), 0.25) / 6.0;
  for (std::size_t i = 2; i <= s; ++i) {
    const auto ki = static_cast<double>(sizes.k[i - 1]);
    if (ki < floor_size || sizes.k[i - 1] > m) {
      out.push_back("k_" + std::to_string(i) + " = " + std::to_string(sizes.k[i - 1]) +
                    " outside [m^{1/4}/6, m]");
    }
  }
  for (std::size_t i = 1; i <= s; ++i) {
    const auto ki = static_cast<double>(sizes.k[i - 1]);
    const double lhs = h_fn(ki, dn);
    const double rhs = 20.0 * g_function(static_cast<double>(sizes.k[i]), m, N);
    if (lhs > rhs * (1.0 + 1e-12)) {
      out.push_back("constraint fails at i = " + std::to_string(i) + ": " +
                    std::to_string(lhs) + " > " + std::to_string(rhs));
    }
  }
  return out;
}

NetDecomposition sparse_net_project(const Eigen::VectorXd& x, const BlockSizes& sizes,
                                    std::size_t n) {
  const std::size_t s = sizes.s;
  if (s == 0 || sizes.k.size() != s + 1) throw std::invalid_argument("malformed block sizes");
  const std::size_t k = sizes.k[0];
  if (static_cast<std::size_t>(x.size()) != n) throw std::invalid_argument("x must lie in R^n");
  if (std::abs(x.norm() - 1.0) > 1e-9) throw std::invalid_argument("x must be a unit vector");
  const auto support = static_cast<std::size_t>((x.array() != 0.0).count());
  if (support > k) throw std::invalid_argument("x has more than k nonzero coordinates");
  if (k > n) throw std::invalid_argument("k exceeds n");

  // Trim: j is the largest index with k_j + ... + k_s >= k.
  std::vector<std::size_t> used(s, 0);
  std::size_t tail = 0;
  std::size_t j = s;
  while (j >= 1) {
    if (tail + sizes.k[j - 1] >= k) break;
    tail += sizes.k[j - 1];
    --j;
  }
  for (std::size_t i = j + 1; i <= s; ++i) used[i - 1] = sizes.k[i - 1];
  used[j - 1] = k - tail;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(x(static_cast<Eigen::Index>(a))) > std::abs(x(static_cast<Eigen::Index>(b)));
  });

  NetDecomposition out;
  out.blocks.assign(s, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  out.supports.assign(s, IndexSet{});
  out.used_sizes = used;
  out.steps.assign(s, 0.0);
  out.projection = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const double dn = static_cast<double>(n);
  std::size_t pos = 0;
  for (std::size_t i = s; i >= 1; --i) {
    const std::size_t ki = used[i - 1];
    if (ki == 0) continue;
    const double dk = static_cast<double>(ki);
    const double cap = static_cast<double>(sizes.k[i]);
    const double step = std::min(std::sqrt(dk), dk / std::sqrt(cap)) / (2.0 * dn);
    out.steps[i - 1] = step;
    IndexSet& f = out.supports[i - 1];
    for (std::size_t c = 0; c < ki; ++c) f.push_back(order[pos++]);
    std::sort(f.begin(), f.end());
    for (std::size_t idx : f) {
      const double v = x(static_cast<Eigen::Index>(idx));
      const double q = std::floor(std::abs(v) / step) * step;
      out.blocks[i - 1](static_cast<Eigen::Index>(idx)) = v < 0.0 ? -q : q;
    }
    out.projection += out.blocks[i - 1];
  }
  return out;
}

NetAudit audit_net_projection(const Eigen::VectorXd& x, const NetDecomposition& net,
                              const BlockSizes& sizes) {
  NetAudit audit;
  audit.distance = (x - net.projection).norm();
  audit.norm = net.projection.norm();
  std::vector<int> owner(static_cast<std::size_t>(x.size()), 0);
  for (std::size_t i = 1; i <= sizes.s; ++i) {
    const Eigen::VectorXd& block = net.blocks[i - 1];
    const double sup = block.cwiseAbs().maxCoeff();
    audit.sup_weight += static_cast<double>(sizes.k[i]) * sup * sup;
    std::size_t nonzero = 0;
    for (Eigen::Index c = 0; c < block.size(); ++c) {
      if (block(c) == 0.0) continue;
      ++nonzero;
    }
    for (std::size_t idx : net.supports[i - 1]) {
      if (++owner[idx] > 1) audit.disjoint = false;
    }
    if (nonzero > sizes.k[i - 1]) audit.sizes_ok = false;
  }
  const auto total = static_cast<std::size_t>((net.projection.array() != 0.0).count());
  if (total > sizes.k[0]) audit.sizes_ok = false;
  return audit;
}

}  // namespace lcrip
