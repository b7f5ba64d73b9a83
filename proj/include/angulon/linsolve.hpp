#pragma once

#include <cstddef>
#include <vector>

#include "angulon/errors.hpp"
#include "angulon/rational.hpp"

namespace angulon {

using RationalMatrix = std::vector<std::vector<Rational>>;

struct LinearSolution {
  bool consistent = true;
  std::size_t rank = 0;
  /// One solution; free unknowns are set to zero.
  std::vector<Rational> x;
};

namespace detail {
inline Integer pivot_weight(const Rational& r) { return abs(r.get_num()) * r.get_den(); }
}  // namespace detail

/// Exact Gauss-Jordan elimination of A x = b. In each column the pivot is the
/// nonzero entry with the smallest |numerator * denominator|, which keeps
/// coefficient growth down.
inline LinearSolution solve_exact(RationalMatrix A, std::vector<Rational> b) {
  const std::size_t rows = A.size();
  if (b.size() != rows) throw DomainError("solve_exact: right-hand side has wrong length");
  const std::size_t cols = rows ? A.front().size() : 0;
  for (const auto& r : A)
    if (r.size() != cols) throw DomainError("solve_exact: ragged matrix");
  LinearSolution sol;
  sol.x.assign(cols, Rational(0));
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = rows;
    Integer best_size;
    for (std::size_t i = r; i < rows; ++i) {
      if (A[i][c] == 0) continue;
      Integer s = detail::pivot_weight(A[i][c]);
      if (best == rows || s < best_size) {
        best = i;
        best_size = s;
      }
    }
    if (best == rows) continue;
    std::swap(A[r], A[best]);
    std::swap(b[r], b[best]);
    const Rational inv = Rational(1) / A[r][c];
    for (std::size_t k = c; k < cols; ++k) A[r][k] *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      const Rational f = A[i][c];
      for (std::size_t k = c; k < cols; ++k)
        if (A[r][k] != 0) A[i][k] -= f * A[r][k];
      b[i] -= f * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  sol.rank = r;
  for (std::size_t i = r; i < rows; ++i)
    if (b[i] != 0) sol.consistent = false;
  for (std::size_t i = 0; i < r; ++i) sol.x[pivot_col[i]] = b[i];
  return sol;
}

}  // namespace angulon
