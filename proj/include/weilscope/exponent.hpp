#pragma once

// Exponent classification and closed-form Weil values for Niho exponents
// over a quadratic tower L = GF(p^{2n}) / F = GF(p^n).
//
// A Niho exponent s = p^j (mod p^n - 1) that is not a power of p mod q - 1
// can be multiplied by a power of p (which leaves every Weil sum unchanged)
// until s = 1 + k(p^n - 1). k is determined mod p^n + 1; the invariants
// d1 = gcd(k, p^n + 1) and d2 = gcd(k - 1, p^n + 1) drive all closed forms.

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "weilscope/errors.hpp"
#include "weilscope/field.hpp"
#include "weilscope/number_theory.hpp"

namespace weilscope {

struct ExponentSpec {
  std::uint64_t s = 0;  // representative in [1, q-1]
  bool invertible = false;
  bool degenerate = false;
  bool niho = false;
  bool rational = false;
  std::optional<unsigned> frobenius_power;     // j with s = p^j mod q-1
  std::optional<std::uint64_t> normalized_s;   // s p^j = 1 mod p^n - 1
  std::optional<std::uint64_t> k;              // normalized_s = 1 + k(p^n - 1), k in [0, p^n]
  std::optional<std::uint64_t> d1;
  std::optional<std::uint64_t> d2;
};

inline ExponentSpec classify(const Field& f, std::uint64_t s) {
  if (s == 0) throw PreconditionError("exponent must be positive");
  const std::uint64_t m = f.unit_order();
  const std::uint64_t p = f.characteristic();
  ExponentSpec out;
  out.s = m == 1 ? 1 : (s - 1) % m + 1;
  out.invertible = std::gcd(out.s, m) == 1;
  out.rational = (out.s - 1) % (p - 1) == 0;
  for (unsigned j = 0; j < f.degree(); ++j) {
    if (out.s % m == pow_mod(p, j, m)) {
      out.degenerate = true;
      out.frobenius_power = j;
      break;
    }
  }
  if (!f.has_tower()) return out;

  const std::uint64_t P = f.sub_order();
  for (unsigned j = 0; j < f.degree(); ++j) {
    const std::uint64_t t = (mul_mod(out.s, pow_mod(p, j, m), m) + m - 1) % m + 1;
    if ((t - 1) % (P - 1) == 0) {
      out.normalized_s = t;
      break;
    }
  }
  if (out.normalized_s) {
    const std::uint64_t k = ((*out.normalized_s - 1) / (P - 1)) % (P + 1);
    out.k = k;
    out.d1 = std::gcd(k, P + 1);
    out.d2 = std::gcd(k == 0 ? std::uint64_t{1} : k - 1, P + 1);
    out.niho = !out.degenerate;
  }
  return out;
}

/// Integer parameters of a normalized Niho exponent s = 1 + k(P - 1), P = p^n.
struct NihoParams {
  std::uint64_t p = 0;
  unsigned n = 0;
  std::uint64_t P = 0;  // p^n
  std::uint64_t k = 0;  // reduced to [0, P]
  std::uint64_t s = 0;
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
  bool invertible = false;
};

inline NihoParams niho_params(std::uint64_t p, unsigned n, std::uint64_t k) {
  if (!is_prime(p)) throw PreconditionError("p = " + std::to_string(p) + " is not prime");
  if (n == 0) throw PreconditionError("n must be at least 1");
  NihoParams np;
  np.p = p;
  np.n = n;
  np.P = checked_pow(p, n, std::uint64_t{1} << 31);
  np.k = k % (np.P + 1);
  np.s = 1 + np.k * (np.P - 1);
  np.d1 = std::gcd(np.k, np.P + 1);
  np.d2 = std::gcd(np.k == 0 ? std::uint64_t{1} : np.k - 1, np.P + 1);
  np.invertible = std::gcd(np.s, np.P * np.P - 1) == 1;
  return np;
}

/// W(zeta_t) for a primitive t-th root of unity zeta_t, t | p^n + 1:
///   t = 1:  p^n (d1 + d2 - 2)
///   t > 1:  p^n (d1 [t | (p^n+1)/d1] + d2 [t | (p^n+1)/d2] - 1)
inline std::int64_t weil_at_root_of_unity(std::uint64_t k, std::uint64_t p, unsigned n,
                                          std::uint64_t t) {
  const NihoParams np = niho_params(p, n, k);
  if (t == 0 || (np.P + 1) % t != 0) {
    throw PreconditionError("t = " + std::to_string(t) + " does not divide p^n + 1 = " +
                            std::to_string(np.P + 1));
  }
  if (!np.invertible) {
    throw PreconditionError("s = " + std::to_string(np.s) + " is not invertible over GF(p^2n)");
  }
  const auto P = static_cast<std::int64_t>(np.P);
  const auto d1 = static_cast<std::int64_t>(np.d1);
  const auto d2 = static_cast<std::int64_t>(np.d2);
  if (t == 1) return P * (d1 + d2 - 2);
  const std::int64_t delta1 = ((np.P + 1) / np.d1) % t == 0;
  const std::int64_t delta2 = ((np.P + 1) / np.d2) % t == 0;
  return P * (d1 * delta1 + d2 * delta2 - 1);
}

/// W(-1) = p^n (d1 (1 + (-1)^{(p^n+1)/d1}) / 2 + d2 (1 + (-1)^{(p^n+1)/d2}) / 2 - 1).
inline std::int64_t weil_at_minus_one(std::uint64_t k, std::uint64_t p, unsigned n) {
  const NihoParams np = niho_params(p, n, k);
  if (!np.invertible) {
    throw PreconditionError("s = " + std::to_string(np.s) + " is not invertible over GF(p^2n)");
  }
  const auto half_sign = [](std::uint64_t e) -> std::int64_t { return e % 2 == 0 ? 1 : 0; };
  const auto P = static_cast<std::int64_t>(np.P);
  return P * (static_cast<std::int64_t>(np.d1) * half_sign((np.P + 1) / np.d1) +
              static_cast<std::int64_t>(np.d2) * half_sign((np.P + 1) / np.d2) - 1);
}

/// |R| = p^n + (d1 - 1)(d1 - 2) + (d2 - 1)(d2 - 2).
inline std::uint64_t r_count_closed_form(std::uint64_t P, std::uint64_t d1, std::uint64_t d2) {
  const auto term = [](std::uint64_t d) { return d >= 2 ? (d - 1) * (d - 2) : 0; };
  return P + term(d1) + term(d2);
}

struct HypothesisReport {
  bool invertible = false;
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
  bool case_i = false;      // d1 + d2 >= 5
  bool case_ii = false;     // d1 + d2 = 3 and p^n = 11 mod 12
  bool theorem_mi = false;  // case (i), n >= 2, 2 <= k < p/2 + 1

  bool none() const { return !case_i && !case_ii && !theorem_mi; }
};

inline HypothesisReport hypothesis_check(std::uint64_t k, std::uint64_t p, unsigned n) {
  const NihoParams np = niho_params(p, n, k);
  HypothesisReport h;
  h.invertible = np.invertible;
  h.d1 = np.d1;
  h.d2 = np.d2;
  if (!np.invertible || p == 2) return h;
  h.case_i = np.d1 + np.d2 >= 5;
  h.case_ii = np.d1 + np.d2 == 3 && np.P % 12 == 11;
  h.theorem_mi = h.case_i && n >= 2 && np.k >= 2 && 2 * np.k < p + 2;
  return h;
}

}  // namespace weilscope
