#pragma once

#include <cstddef>
#include <vector>

#include "tenscert/rational.hpp"

namespace tenscert {

inline Rational exact_div(const Rational& a, const Rational& b) { return a / b; }

template <typename T>
using SquareMatrix = std::vector<std::vector<T>>;

// Fraction-free Bareiss elimination. Intermediate entries stay in the ring
// (pivot divisions are exact), which keeps rational and polynomial entries
// from blowing up. Requires exact_div(T, T).
template <typename T>
T det_bareiss(SquareMatrix<T> m) {
  const std::size_t n = m.size();
  if (n == 0) return T(1);
  T prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == T(0)) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == T(0)) ++swap_row;
      if (swap_row == n) return T(0);
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = exact_div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
      m[i][k] = T(0);
    }
    prev = m[k][k];
  }
  return sign > 0 ? m[n - 1][n - 1] : T(0) - m[n - 1][n - 1];
}

// Division-free determinant by Laplace expansion with memoization over column
// subsets. O(2^n * n) ring operations; no pivots, so it is safe for floating
// polynomial entries. Sized for n <= ~20.
template <typename T>
T det_minor_expansion(const SquareMatrix<T>& m) {
  const std::size_t n = m.size();
  if (n == 0) return T(1);
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<T> dp(full + 1, T(0));
  std::vector<bool> live(full + 1, false);
  dp[0] = T(1);
  live[0] = true;
  for (std::size_t mask = 0; mask <= full; ++mask) {
    if (!live[mask]) continue;
    std::size_t row = 0;
    for (std::size_t b = mask; b; b >>= 1) row += b & 1;
    if (row == n) continue;
    std::size_t seen = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (std::size_t{1} << j)) {
        ++seen;
        continue;
      }
      // cofactor sign: row index + position of column j inside the new subset
      const bool negative = ((row + seen) & 1) != 0;
      T term = dp[mask] * m[row][j];
      const std::size_t next = mask | (std::size_t{1} << j);
      if (negative)
        dp[next] -= term;
      else
        dp[next] += term;
      live[next] = true;
    }
  }
  return dp[full];
}

}  // namespace tenscert
