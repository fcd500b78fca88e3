#include "lcrip/subsets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lcrip {

double binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (!std::isfinite(result)) return std::numeric_limits<double>::infinity();
  }
  return std::round(result);
}

bool next_combination(IndexSet& subset, std::size_t n) noexcept {
  const std::size_t k = subset.size();
  for (std::size_t pos = k; pos-- > 0;) {
    if (subset[pos] < n - k + pos) {
      ++subset[pos];
      for (std::size_t j = pos + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
      return true;
    }
  }
  return false;
}

IndexSet unrank_combination(std::uint64_t rank, std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("subset larger than ground set");
  IndexSet subset;
  subset.reserve(k);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (;; ++next) {
      // Number of subsets whose slot-th element is `next`.
      const auto block =
          static_cast<std::uint64_t>(binomial(n - next - 1, k - slot - 1));
      if (rank < block) break;
      rank -= block;
    }
    subset.push_back(next++);
  }
  return subset;
}

bool lex_less(const IndexSet& a, const IndexSet& b) noexcept {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace lcrip
