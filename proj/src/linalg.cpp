#include "pmdp/linalg.hpp"

#include <cstddef>

#include "pmdp/errors.hpp"

namespace pmdp {

Mat solve_linear_multi(Mat a, Mat rhs) {
  const std::size_t n = a.size();
  if (rhs.size() != n) throw InternalError("solve_linear: shape mismatch");
  const std::size_t m = n == 0 ? 0 : rhs[0].size();

  // Forward elimination with first-nonzero pivoting. Exact arithmetic needs
  // no magnitude-based pivot choice, only a nonzero one.
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[perm[pivot]][col].is_zero()) ++pivot;
    if (pivot == n) throw InternalError("solve_linear: singular system");
    std::swap(perm[col], perm[pivot]);
    const std::size_t pr = perm[col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const std::size_t rr = perm[r];
      if (a[rr][col].is_zero()) continue;
      Rational f = a[rr][col] / a[pr][col];
      a[rr][col] = Rational(0);
      for (std::size_t c = col + 1; c < n; ++c) {
        if (!a[pr][c].is_zero()) a[rr][c] -= f * a[pr][c];
      }
      for (std::size_t c = 0; c < m; ++c) {
        if (!rhs[pr][c].is_zero()) rhs[rr][c] -= f * rhs[pr][c];
      }
    }
  }

  Mat x(n, Vec(m, Rational(0)));
  for (std::size_t ri = n; ri-- > 0;) {
    const std::size_t rr = perm[ri];
    for (std::size_t c = 0; c < m; ++c) {
      Rational acc = rhs[rr][c];
      for (std::size_t k = ri + 1; k < n; ++k) {
        if (!a[rr][k].is_zero() && !x[k][c].is_zero()) acc -= a[rr][k] * x[k][c];
      }
      x[ri][c] = acc / a[rr][ri];
    }
  }
  return x;
}

Vec solve_linear(Mat a, Vec b) {
  Mat rhs(b.size(), Vec(1));
  for (std::size_t i = 0; i < b.size(); ++i) rhs[i][0] = b[i];
  Mat x = solve_linear_multi(std::move(a), std::move(rhs));
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i][0];
  return out;
}

}  // namespace pmdp
