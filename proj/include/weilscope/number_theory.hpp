#pragma once

// Integer helpers shared by the field builder, the exponent classifier and
// the scanners. Everything here works on 64-bit values; callers keep field
// sizes far below the range where products overflow.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "weilscope/errors.hpp"

namespace weilscope {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

/// Distinct prime factors in increasing order.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// Positive divisors in increasing order.
inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> low, high;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      low.push_back(d);
      if (d != n / d) high.push_back(n / d);
    }
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

/// b^e with an overflow guard; throws PreconditionError past `limit`.
inline std::uint64_t checked_pow(std::uint64_t b, unsigned e,
                                 std::uint64_t limit = UINT64_MAX) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (b != 0 && r > limit / b) {
      throw PreconditionError("integer power exceeds limit");
    }
    r *= b;
  }
  return r;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t r = 1;
  b %= m;
  while (e > 0) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

/// Nonnegative residue of a signed value.
inline std::uint64_t mod_floor(std::int64_t a, std::uint64_t m) {
  const auto mm = static_cast<std::int64_t>(m);
  std::int64_t r = a % mm;
  return static_cast<std::uint64_t>(r < 0 ? r + mm : r);
}

/// Largest e with p^e dividing n, or 0 when n is not a power of p.
/// Returns {is_power, exponent}.
inline std::pair<bool, unsigned> log_exact(std::uint64_t n, std::uint64_t p) {
  unsigned e = 0;
  while (n > 1 && n % p == 0) {
    n /= p;
    ++e;
  }
  return {n == 1, e};
}

/// Prime powers p^m (p prime, m >= 1) up to `limit`, sorted by value then p.
struct PrimePower {
  std::uint64_t p;
  unsigned m;
  std::uint64_t value;
};

inline std::vector<PrimePower> prime_powers_up_to(std::uint64_t limit,
                                                  bool odd_only) {
  std::vector<PrimePower> out;
  for (std::uint64_t p = odd_only ? 3 : 2; p <= limit; ++p) {
    if (!is_prime(p)) continue;
    std::uint64_t v = p;
    for (unsigned m = 1; v <= limit; ++m) {
      out.push_back({p, m, v});
      if (v > limit / p) break;
      v *= p;
    }
  }
  std::sort(out.begin(), out.end(), [](const PrimePower& a, const PrimePower& b) {
    return a.value != b.value ? a.value < b.value : a.p < b.p;
  });
  return out;
}

}  // namespace weilscope
