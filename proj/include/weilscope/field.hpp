#pragma once

// GF(p^n) with full log/antilog/Zech tables.
//
// Elements are integer encodings sum c_i p^i of their polynomial coordinates
// over the modulus. The modulus is the lexicographically smallest monic
// irreducible by (c_0, c_1, ...) and the generator is the primitive element
// with the smallest encoding, so two builds of the same (p, n) are identical.
//
// When n is even the field doubles as the tower GF(p^n) / GF(p^{n/2}) and the
// relative trace and norm tables are filled in as well.

#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weilscope/errors.hpp"
#include "weilscope/number_theory.hpp"

namespace weilscope {

struct Element {
  std::uint32_t value = 0;

  constexpr bool is_zero() const { return value == 0; }
  friend constexpr auto operator<=>(const Element&, const Element&) = default;
};

namespace detail {

// Dense polynomials over GF(p), lowest coefficient first, no trailing zeros.
using Poly = std::vector<std::uint64_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mod(Poly a, const Poly& m, std::uint64_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint64_t inv_lead = pow_mod(m.back(), p - 2, p);
  while (a.size() > dm) {
    const std::uint64_t c = mul_mod(a.back(), inv_lead, p);
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = (a[shift + i] + p - mul_mod(c, m[i], p)) % p;
    }
    trim(a);
  }
  return a;
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m,
                        std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = (r[i + j] + mul_mod(a[i], b[j], p)) % p;
    }
  }
  return poly_mod(std::move(r), m, p);
}

inline Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m,
                        std::uint64_t p) {
  Poly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e > 0) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

inline Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Ben-Or: f of degree n is irreducible iff gcd(f, x^{p^i} - x) = 1 for
// every i <= n/2.
inline bool is_irreducible(const Poly& f, std::uint64_t p) {
  const std::size_t n = f.size() - 1;
  if (n <= 1) return n == 1;
  Poly xp{0, 1};
  for (std::size_t i = 1; i <= n / 2; ++i) {
    xp = poly_powmod(xp, p, f, p);
    Poly d = xp;
    d.resize(std::max<std::size_t>(d.size(), 2), 0);
    d[1] = (d[1] + p - 1) % p;
    trim(d);
    if (d.empty()) return false;
    if (poly_gcd(f, d, p).size() != 1) return false;
  }
  return true;
}

}  // namespace detail

class Field {
 public:
  static constexpr std::uint64_t kDefaultSizeCap = std::uint64_t{1} << 26;
  static constexpr std::uint32_t kNoLog = std::numeric_limits<std::uint32_t>::max();

  /// Builds GF(p^n). Throws PreconditionError when p is not prime or n is 0
  /// and SizeCapError when p^n exceeds `size_cap`.
  static Field build(std::uint64_t p, unsigned n,
                     std::uint64_t size_cap = kDefaultSizeCap) {
    if (!is_prime(p)) {
      throw PreconditionError("p = " + std::to_string(p) + " is not prime");
    }
    if (n == 0) throw PreconditionError("extension degree must be at least 1");
    const std::uint64_t hard_cap = std::min<std::uint64_t>(size_cap, UINT32_MAX);
    std::uint64_t q = 1;
    for (unsigned i = 0; i < n; ++i) {
      if (q > hard_cap / p) {
        throw SizeCapError("field of order " + std::to_string(p) + "^" +
                           std::to_string(n) + " exceeds size cap " +
                           std::to_string(size_cap));
      }
      q *= p;
    }
    Field f;
    f.p_ = p;
    f.n_ = n;
    f.q_ = q;
    f.find_modulus();
    f.find_generator();
    f.fill_tables();
    return f;
  }

  std::uint64_t characteristic() const { return p_; }
  unsigned degree() const { return n_; }
  std::uint64_t order() const { return q_; }
  std::uint64_t unit_order() const { return q_ - 1; }

  /// Monic modulus coefficients c_0..c_{n-1}, 1.
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }
  Element generator() const { return generator_; }

  bool has_tower() const { return n_ % 2 == 0; }
  /// |F| = p^{n/2} for the tower view; throws on odd degree.
  std::uint64_t sub_order() const {
    require_tower();
    return sub_order_;
  }

  Element zero() const { return {0}; }
  Element one() const { return {1}; }
  Element minus_one() const { return p_ == 2 ? one() : exp(half_); }
  /// The prime-field constant c mod p.
  Element constant(std::uint64_t c) const {
    return {static_cast<std::uint32_t>(c % p_)};
  }
  bool valid(Element x) const { return x.value < q_; }

  /// Discrete log to base g; x must be nonzero.
  std::uint32_t log(Element x) const {
    if (x.is_zero()) throw PreconditionError("log of zero");
    return log_[x.value];
  }
  /// g^j for any integer j.
  Element exp(std::int64_t j) const {
    return {antilog_[mod_floor(j, q_ - 1)]};
  }

  Element add(Element a, Element b) const {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const std::uint64_t la = log_[a.value];
    const std::uint64_t d = (log_[b.value] + (q_ - 1) - la) % (q_ - 1);
    const std::uint32_t z = zech_[d];
    if (z == kNoLog) return zero();
    return {antilog_[(la + z) % (q_ - 1)]};
  }
  Element neg(Element a) const {
    if (a.is_zero() || p_ == 2) return a;
    return {antilog_[(log_[a.value] + half_) % (q_ - 1)]};
  }
  Element sub(Element a, Element b) const { return add(a, neg(b)); }
  Element mul(Element a, Element b) const {
    if (a.is_zero() || b.is_zero()) return zero();
    return {antilog_[(std::uint64_t{log_[a.value]} + log_[b.value]) % (q_ - 1)]};
  }
  Element inv(Element a) const {
    if (a.is_zero()) throw PreconditionError("inverse of zero");
    return {antilog_[(q_ - 1 - log_[a.value]) % (q_ - 1)]};
  }

  /// x^e for any integer e; 0^0 = 1 and negative powers of zero throw.
  Element pow(Element x, std::int64_t e) const {
    if (x.is_zero()) {
      if (e < 0) throw PreconditionError("negative power of zero");
      return e == 0 ? one() : zero();
    }
    const std::uint64_t em = mod_floor(e, q_ - 1);
    return {antilog_[mul_mod(log_[x.value], em, q_ - 1)]};
  }
  /// x^{p^j}.
  Element frobenius(Element x, unsigned j) const {
    if (x.is_zero()) return x;
    const std::uint64_t e = pow_mod(p_, j, q_ - 1);
    return {antilog_[mul_mod(log_[x.value], e, q_ - 1)]};
  }

  /// Absolute trace to GF(p), as an integer in [0, p).
  std::uint32_t trace_abs(Element x) const { return abs_trace_[x.value]; }
  /// x + x^{p^{n/2}}.
  Element trace_rel(Element x) const {
    require_tower();
    return {rel_trace_[x.value]};
  }
  /// x^{p^{n/2}+1}.
  Element norm_rel(Element x) const {
    require_tower();
    return {rel_norm_[x.value]};
  }
  /// Whether x lies in the subfield GF(p^{n/2}).
  bool in_subfield(Element x) const {
    require_tower();
    return x.is_zero() || log_[x.value] % (sub_order_ + 1) == 0;
  }
  /// Whether trace_rel(g^j) == 0, decided from the exponent alone:
  /// y + y^{P} = 0 with y != 0 iff y^{P-1} = -1 iff j = log(-1)/(P-1) mod P+1.
  bool rel_trace_zero_log(std::uint64_t j) const {
    return j % (sub_order_ + 1) == rel_zero_residue_;
  }

  // Raw tables for the inner loops of the Weil engine.
  std::span<const std::uint32_t> antilog_table() const { return antilog_; }
  std::span<const std::uint32_t> log_table() const { return log_; }
  std::span<const std::uint32_t> zech_table() const { return zech_; }
  std::span<const std::uint32_t> abs_trace_table() const { return abs_trace_; }
  std::span<const std::uint32_t> rel_trace_table() const { return rel_trace_; }
  std::span<const std::uint32_t> rel_norm_table() const { return rel_norm_; }
  /// log(-1): (q-1)/2 for odd p, 0 for p = 2.
  std::uint64_t log_minus_one() const { return p_ == 2 ? 0 : half_; }

  /// Polynomial coordinates c_0..c_{n-1} of x.
  std::vector<std::uint64_t> coordinates(Element x) const {
    std::vector<std::uint64_t> c(n_);
    std::uint64_t v = x.value;
    for (unsigned i = 0; i < n_; ++i) {
      c[i] = v % p_;
      v /= p_;
    }
    return c;
  }
  Element from_coordinates(std::span<const std::uint64_t> c) const {
    std::uint64_t v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * p_ + c[i] % p_;
    return {static_cast<std::uint32_t>(v)};
  }

  /// "0" for zero, otherwise "g^j".
  std::string power_notation(Element x) const {
    if (x.is_zero()) return "0";
    return "g^" + std::to_string(log_[x.value]);
  }

  /// Polynomial notation in x, highest degree first: "2x^2+x+1".
  std::string polynomial_notation(Element x) const {
    const auto c = coordinates(x);
    std::string out;
    for (std::size_t i = c.size(); i-- > 0;) {
      if (c[i] == 0) continue;
      if (!out.empty()) out += '+';
      if (i == 0) {
        out += std::to_string(c[i]);
        continue;
      }
      if (c[i] != 1) out += std::to_string(c[i]);
      out += 'x';
      if (i > 1) out += '^' + std::to_string(i);
    }
    return out.empty() ? "0" : out;
  }

  /// Accepts an integer encoding ("4"), a polynomial in x ("1+x", "2x^2+1")
  /// or a power of the generator ("g", "g^3", "g^-1").
  Element parse(std::string_view text) const;

 private:
  Field() = default;

  void require_tower() const {
    if (!has_tower()) {
      throw PreconditionError("relative trace/norm need an even-degree field, got degree " +
                              std::to_string(n_));
    }
  }

  void find_modulus() {
    if (n_ == 1) {
      modulus_ = {0, 1};
      return;
    }
    // Tuples (c_0, ..., c_{n-1}) in lexicographic order: c_0 most significant.
    std::vector<std::uint64_t> c(n_, 0);
    for (;;) {
      detail::Poly f(c.begin(), c.end());
      f.push_back(1);
      if (c[0] != 0 && detail::is_irreducible(f, p_)) {
        modulus_ = f;
        return;
      }
      std::size_t i = n_;
      while (i-- > 0) {
        if (++c[i] < p_) break;
        c[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) {
        throw Error("no irreducible polynomial found");  // unreachable
      }
    }
  }

  detail::Poly to_poly(std::uint64_t enc) const {
    detail::Poly a(n_);
    for (unsigned i = 0; i < n_; ++i) {
      a[i] = enc % p_;
      enc /= p_;
    }
    detail::trim(a);
    return a;
  }
  std::uint64_t from_poly(const detail::Poly& a) const {
    std::uint64_t v = 0;
    for (std::size_t i = a.size(); i-- > 0;) v = v * p_ + a[i];
    return v;
  }

  void find_generator() {
    const std::uint64_t order = q_ - 1;
    const auto factors = prime_factors(order);
    for (std::uint64_t e = 1; e < q_; ++e) {
      const detail::Poly g = to_poly(e);
      bool primitive = true;
      for (std::uint64_t r : factors) {
        if (detail::poly_powmod(g, order / r, modulus_, p_) == detail::Poly{1}) {
          primitive = false;
          break;
        }
      }
      if (order == 1 || primitive) {
        generator_ = {static_cast<std::uint32_t>(e)};
        return;
      }
    }
    throw Error("no primitive element found");  // unreachable
  }

  void fill_tables() {
    const std::uint64_t m = q_ - 1;
    half_ = (p_ == 2) ? 0 : m / 2;
    antilog_.assign(m, 0);
    log_.assign(q_, kNoLog);

    // Successive multiplication by g. g has low degree in practice, so each
    // step costs O(n * deg g).
    const detail::Poly g = to_poly(generator_.value);
    std::vector<std::uint64_t> cur(n_, 0), next(2 * n_ + 1, 0);
    cur[0] = 1;
    for (std::uint64_t j = 0; j < m; ++j) {
      std::uint64_t enc = 0;
      for (std::size_t i = n_; i-- > 0;) enc = enc * p_ + cur[i];
      antilog_[j] = static_cast<std::uint32_t>(enc);
      if (log_[enc] != kNoLog) throw Error("generator is not primitive");
      log_[enc] = static_cast<std::uint32_t>(j);

      std::fill(next.begin(), next.end(), 0);
      for (std::size_t a = 0; a < n_; ++a) {
        if (cur[a] == 0) continue;
        for (std::size_t b = 0; b < g.size(); ++b) {
          next[a + b] = (next[a + b] + cur[a] * g[b]) % p_;
        }
      }
      for (std::size_t d = n_ + g.size(); d-- > n_;) {
        const std::uint64_t c = next[d];
        if (c == 0) continue;
        next[d] = 0;
        for (std::size_t i = 0; i < n_; ++i) {
          next[d - n_ + i] = (next[d - n_ + i] + p_ - c * modulus_[i] % p_) % p_;
        }
      }
      std::copy(next.begin(), next.begin() + n_, cur.begin());
    }

    // zech[j] = log(1 + g^j); adding 1 only touches the constant digit.
    zech_.assign(m, kNoLog);
    for (std::uint64_t j = 0; j < m; ++j) {
      const std::uint64_t e = antilog_[j];
      const std::uint64_t s = (e % p_ == p_ - 1) ? e - (p_ - 1) : e + 1;
      zech_[j] = s == 0 ? kNoLog : log_[s];
    }

    // Absolute trace is linear: tabulate it on the basis x^i and extend.
    std::vector<std::uint64_t> basis_trace(n_);
    for (unsigned i = 0; i < n_; ++i) {
      const Element b = i == 0 ? one() : Element{static_cast<std::uint32_t>(checked_pow(p_, i))};
      Element t = zero();
      Element y = b;
      for (unsigned j = 0; j < n_; ++j) {
        t = add(t, y);
        y = pow(y, static_cast<std::int64_t>(p_));
      }
      if (t.value >= p_) throw Error("trace left the prime field");
      basis_trace[i] = t.value;
    }
    abs_trace_.assign(q_, 0);
    std::uint64_t block = 1;
    for (unsigned i = 0; i < n_; ++i) {
      for (std::uint64_t d = 1; d < p_; ++d) {
        const std::uint64_t add_t = mul_mod(d, basis_trace[i], p_);
        for (std::uint64_t r = 0; r < block; ++r) {
          abs_trace_[d * block + r] =
              static_cast<std::uint32_t>((abs_trace_[r] + add_t) % p_);
        }
      }
      block *= p_;
    }

    if (has_tower()) {
      sub_order_ = checked_pow(p_, n_ / 2);
      rel_zero_residue_ = (log_minus_one() / (sub_order_ - 1)) % (sub_order_ + 1);
      rel_trace_.assign(q_, 0);
      rel_norm_.assign(q_, 0);
      for (std::uint64_t e = 1; e < q_; ++e) {
        const std::uint64_t l = log_[e];
        const Element x{static_cast<std::uint32_t>(e)};
        const Element xp{antilog_[mul_mod(l, sub_order_, m)]};
        rel_trace_[e] = add(x, xp).value;
        rel_norm_[e] = antilog_[mul_mod(l, sub_order_ + 1, m)];
      }
    }
  }

  std::uint64_t p_ = 0;
  unsigned n_ = 0;
  std::uint64_t q_ = 0;
  std::uint64_t half_ = 0;
  std::uint64_t sub_order_ = 0;
  std::uint64_t rel_zero_residue_ = 0;
  std::vector<std::uint64_t> modulus_;
  Element generator_;
  std::vector<std::uint32_t> antilog_;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> zech_;
  std::vector<std::uint32_t> abs_trace_;
  std::vector<std::uint32_t> rel_trace_;
  std::vector<std::uint32_t> rel_norm_;
};

inline Element Field::parse(std::string_view text) const {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  auto fail = [&](const std::string& why) -> PreconditionError {
    return PreconditionError("bad element '" + std::string(text) + "': " + why);
  };
  auto parse_int = [&](std::string_view d, bool allow_sign) -> std::int64_t {
    if (d.empty()) throw fail("missing number");
    bool negative = false;
    if (allow_sign && (d[0] == '-' || d[0] == '+')) {
      negative = d[0] == '-';
      d.remove_prefix(1);
      if (d.empty()) throw fail("missing number");
    }
    std::int64_t v = 0;
    for (char ch : d) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw fail("not a number");
      if (v > (INT64_MAX - 9) / 10) throw fail("number too large");
      v = v * 10 + (ch - '0');
    }
    return negative ? -v : v;
  };
  if (s.empty()) throw fail("empty");

  if (s[0] == 'g') {
    if (s.size() == 1) return generator_;
    if (s[1] != '^') throw fail("expected g^j");
    return exp(parse_int(std::string_view(s).substr(2), true));
  }

  if (s.find('x') == std::string::npos) {
    const std::int64_t v = parse_int(s, false);
    if (static_cast<std::uint64_t>(v) >= q_) throw fail("encoding out of range");
    return {static_cast<std::uint32_t>(v)};
  }

  std::vector<std::uint64_t> coef(n_, 0);
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find('+', pos);
    if (end == std::string::npos) end = s.size();
    std::string_view term = std::string_view(s).substr(pos, end - pos);
    if (term.empty()) throw fail("empty term");
    const std::size_t xp = term.find('x');
    std::uint64_t c = 1;
    std::uint64_t deg = 0;
    if (xp == std::string_view::npos) {
      c = static_cast<std::uint64_t>(parse_int(term, false));
    } else {
      std::string_view head = term.substr(0, xp);
      if (!head.empty() && head.back() == '*') head.remove_suffix(1);
      if (!head.empty()) c = static_cast<std::uint64_t>(parse_int(head, false));
      std::string_view tail = term.substr(xp + 1);
      if (tail.empty()) {
        deg = 1;
      } else {
        if (tail[0] != '^') throw fail("expected x^e");
        deg = static_cast<std::uint64_t>(parse_int(tail.substr(1), false));
      }
    }
    if (deg >= n_) throw fail("degree not below field degree");
    if (c >= p_) throw fail("coefficient not below p");
    coef[deg] = (coef[deg] + c) % p_;
    pos = end + 1;
    if (end == s.size()) break;
    if (pos == s.size()) throw fail("trailing '+'");
  }
  return from_coordinates(coef);
}

}  // namespace weilscope
