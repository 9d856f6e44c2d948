#pragma once

// Multiplicities of a hypothetical four-valued Niho spectrum.
//
// Suppose W_{L,s}(a), a in L, only takes the values -p^n, 0, 2 alpha p^n and
// (d1 + d2 - 2) p^n with multiplicities m1..m4. Writing h = W / p^n, the first
// three power moments and |R| give
//
//   m1 + m2 + m3 + m4                                   = p^{2n}
//   -m1 + 2 alpha m3 + b m4                             = p^n
//   m1 + (2 alpha)^2 m3 + b^2 m4                        = p^{2n}
//   -m1 + (2 alpha)^3 m3 + b^3 m4                       = p^n |R|
//
// with b = d1 + d2 - 2 and |R| = p^n + (d1-1)(d1-2) + (d2-1)(d2-2). The
// system is Vandermonde in (-1, 0, 2 alpha, b), so it has a unique rational
// solution unless 2 alpha = b.

#include <array>
#include <cstdint>
#include <string>

#include "weilscope/errors.hpp"
#include "weilscope/exponent.hpp"
#include "weilscope/rational.hpp"

namespace weilscope {

struct MultiplicitySolution {
  std::array<Rational, 4> m{};  // for values -p^n, 0, 2 alpha p^n, (d1+d2-2) p^n
  std::uint64_t alpha = 0;
  std::uint64_t odd_factor = 0;  // 2 beta + 1 = d1 + d2 - 2
  std::uint64_t r_count = 0;
  bool feasible = false;         // all m_i nonnegative integers and m4 >= 1
  bool substitution_ok = false;  // solution reproduces the right-hand sides
};

namespace detail {

// Gaussian elimination with partial pivoting on nonzero entries.
inline std::array<Rational, 4> solve4(std::array<std::array<Rational, 5>, 4> a) {
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t pivot = col;
    while (pivot < 4 && a[pivot][col].is_zero()) ++pivot;
    if (pivot == 4) throw SingularSystemError("multiplicity system is singular");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < 4; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      const Rational factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < 5; ++c) a[r][c] = a[r][c] - factor * a[col][c];
    }
  }
  std::array<Rational, 4> x{};
  for (std::size_t i = 0; i < 4; ++i) x[i] = a[i][4] / a[i][i];
  return x;
}

}  // namespace detail

inline MultiplicitySolution multiplicity_solver(std::uint64_t d1, std::uint64_t d2,
                                                std::uint64_t alpha, std::uint64_t pn) {
  if (d1 == 0 || d2 == 0 || d1 + d2 < 3) {
    throw PreconditionError("multiplicity system needs d1, d2 >= 1 and d1 + d2 >= 3");
  }
  if (alpha == 0) throw PreconditionError("alpha must be at least 1");
  if (pn < 2) throw PreconditionError("p^n must be at least 2");
  const std::uint64_t b = d1 + d2 - 2;
  if (2 * alpha == b) {
    throw SingularSystemError("2 alpha = d1 + d2 - 2: the even and odd values coincide");
  }

  MultiplicitySolution sol;
  sol.alpha = alpha;
  sol.odd_factor = b;
  sol.r_count = r_count_closed_form(pn, d1, d2);

  const std::array<Rational, 4> values{Rational(-1), Rational(0),
                                       Rational(static_cast<std::int64_t>(2 * alpha)),
                                       Rational(static_cast<std::int64_t>(b))};
  const auto P = static_cast<std::int64_t>(pn);
  const std::array<Rational, 4> rhs{Rational(P * P), Rational(P), Rational(P * P),
                                    Rational(P) * Rational(static_cast<std::int64_t>(sol.r_count))};

  std::array<std::array<Rational, 5>, 4> aug{};
  for (std::size_t row = 0; row < 4; ++row) {
    for (std::size_t col = 0; col < 4; ++col) {
      Rational v(1);
      for (std::size_t e = 0; e < row; ++e) v = v * values[col];
      aug[row][col] = v;
    }
    aug[row][4] = rhs[row];
  }
  sol.m = detail::solve4(aug);

  sol.substitution_ok = true;
  for (std::size_t row = 0; row < 4; ++row) {
    Rational lhs(0);
    for (std::size_t col = 0; col < 4; ++col) lhs = lhs + aug[row][col] * sol.m[col];
    if (!(lhs == rhs[row])) sol.substitution_ok = false;
  }

  sol.feasible = true;
  for (const Rational& mi : sol.m) {
    if (!mi.is_integer() || mi.num() < 0) sol.feasible = false;
  }
  if (sol.feasible && sol.m[3].num() < 1) sol.feasible = false;
  return sol;
}

}  // namespace weilscope
