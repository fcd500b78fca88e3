#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lcrip {

using IndexSet = std::vector<std::size_t>;

/// C(n, k) as a double (exact up to 2^53, saturating to +inf beyond).
double binomial(std::size_t n, std::size_t k) noexcept;

/// Advances a sorted k-subset of {0..n-1} to its lexicographic successor.
/// Returns false (leaving the set unchanged) when it is already the last.
bool next_combination(IndexSet& subset, std::size_t n) noexcept;

/// The rank-th k-subset of {0..n-1} in lexicographic order.
IndexSet unrank_combination(std::uint64_t rank, std::size_t n, std::size_t k);

/// Lexicographic comparison; used to break ties between equal maxima.
bool lex_less(const IndexSet& a, const IndexSet& b) noexcept;

}  // namespace lcrip
