#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcrip/subsets.hpp"

namespace lcrip {

/// Block sizes k_1 = k, k_2 = m, ..., k_{s+1} = 1 for the multi-scale net
/// of k-sparse unit vectors, with the l-sequence they were built from.
struct BlockSizes {
  std::size_t s = 0;
  std::vector<std::size_t> k;  ///< k[i - 1] = k_i for i = 1..s+1
  std::vector<double> ell;     ///< ell_0..ell_{s-1}

  [[nodiscard]] std::size_t size(std::size_t i) const { return k.at(i - 1); }
};

/// Builds the sizes from ell_0 = 1, h(ell_i) = 10 g(ell_{i-1}) with
/// h(z) = z log(en/z), stopping once ell_{s-1} >= m; if 10 g(ell_{j-1}) >= n
/// the sequence ends with ell_j = m. Requires n <= N, 1 <= k <= n, 1 <= m <= N
/// and k <= k' when k' exists. Throws std::logic_error naming the failing
/// index if the result violates block_size_violations().
BlockSizes choose_block_sizes(std::size_t k, std::size_t m, std::size_t n, std::size_t N);

/// Human-readable descriptions of every violated condition:
///   k_i log(en/k_i) <= 20 g(k_{i+1}) for i = 1..s,
///   m^{1/4}/6 <= k_i <= m for 2 <= i <= s, k_{s+1} = 1.
std::vector<std::string> block_size_violations(const BlockSizes& sizes, std::size_t m,
                                               std::size_t n, std::size_t N);

/// pi(x) = pi_1(x) + ... + pi_s(x) for a k-sparse unit x in R^n.
struct NetDecomposition {
  std::vector<Eigen::VectorXd> blocks;  ///< pi_i(x), i = 1..s (zero below the first used block)
  std::vector<IndexSet> supports;       ///< F_i
  std::vector<std::size_t> used_sizes;  ///< block sizes after trimming to sum k
  std::vector<double> steps;            ///< lattice step of each block
  Eigen::VectorXd projection;           ///< pi(x)
};

/// Assigns the k_s largest |x_i| to F_s, the next k_{s-1} to F_{s-1}, and
/// so on (sizes trimmed from the bottom so they sum to k), then rounds each
/// block toward zero on a lattice of step
///   min(sqrt(k_i), k_i / sqrt(k_{i+1})) / (2n),
/// which keeps |x_F - pi_i| <= k_i/(2n) and ||x_F - pi_i||_inf <= k_i/(2n sqrt(k_{i+1})).
NetDecomposition sparse_net_project(const Eigen::VectorXd& x, const BlockSizes& sizes,
                                    std::size_t n);

struct NetAudit {
  double distance = 0.0;      ///< |x - pi(x)|
  double sup_weight = 0.0;    ///< sum_i k_{i+1} ||pi_i||_inf^2
  double norm = 0.0;          ///< |pi(x)|
  bool disjoint = true;
  bool sizes_ok = true;       ///< |supp pi_i| <= k_i and |supp pi| <= k
};

NetAudit audit_net_projection(const Eigen::VectorXd& x, const NetDecomposition& net,
                              const BlockSizes& sizes);

}  // namespace lcrip
