#pragma once

// Slow reference field for tests. Shares nothing with the library: plain
// coefficient vectors, trial-division irreducibility, order by repeated
// multiplication. Only meant for q up to a few thousand.

#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using Poly = std::vector<std::uint64_t>;  // low degree first, length n

class BruteField {
 public:
  BruteField(std::uint64_t p, unsigned n) : p_(p), n_(n) {
    q_ = 1;
    for (unsigned i = 0; i < n; ++i) q_ *= p;
    find_modulus();
    find_generator();
  }

  std::uint64_t p() const { return p_; }
  unsigned n() const { return n_; }
  std::uint64_t q() const { return q_; }
  const Poly& modulus() const { return mod_; }  // monic, length n + 1
  std::uint64_t generator() const { return gen_; }

  Poly decode(std::uint64_t e) const {
    Poly c(n_, 0);
    for (unsigned i = 0; i < n_; ++i) {
      c[i] = e % p_;
      e /= p_;
    }
    return c;
  }
  std::uint64_t encode(const Poly& c) const {
    std::uint64_t e = 0;
    for (unsigned i = n_; i-- > 0;) e = e * p_ + c[i];
    return e;
  }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    Poly x = decode(a), y = decode(b);
    for (unsigned i = 0; i < n_; ++i) x[i] = (x[i] + y[i]) % p_;
    return encode(x);
  }
  std::uint64_t neg(std::uint64_t a) const {
    Poly x = decode(a);
    for (auto& c : x) c = (p_ - c) % p_;
    return encode(x);
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return add(a, neg(b)); }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return encode(mulp(decode(a), decode(b))); }

  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// Absolute trace as an integer in [0, p).
  std::uint64_t trace(std::uint64_t a) const {
    std::uint64_t t = 0, x = a;
    for (unsigned i = 0; i < n_; ++i) {
      t = add(t, x);
      x = pow(x, p_);
    }
    return decode(t)[0];
  }

  /// Trace to the subfield of degree n/2: x + x^{p^{n/2}}.
  std::uint64_t rel_trace(std::uint64_t a) const { return add(a, pow(a, sub_order())); }
  std::uint64_t rel_norm(std::uint64_t a) const { return mul(a, pow(a, sub_order())); }
  std::uint64_t sub_order() const {
    std::uint64_t P = 1;
    for (unsigned i = 0; i < n_ / 2; ++i) P *= p_;
    return P;
  }

  /// Histogram c_t = #{x : Tr(x^s - a x) = t}.
  std::vector<std::uint64_t> weil_counts(std::uint64_t s, std::uint64_t a) const {
    std::vector<std::uint64_t> c(p_, 0);
    for (std::uint64_t x = 0; x < q_; ++x) ++c[trace(sub(pow(x, s), mul(a, x)))];
    return c;
  }

  /// Integer value; caller guarantees rationality.
  std::int64_t weil_value(std::uint64_t s, std::uint64_t a) const {
    const auto c = weil_counts(s, a);
    return static_cast<std::int64_t>(c[0]) - static_cast<std::int64_t>(p_ > 1 ? c[1] : 0);
  }

  std::map<std::int64_t, std::uint64_t> spectrum(std::uint64_t s) const {
    std::map<std::int64_t, std::uint64_t> h;
    for (std::uint64_t a = 1; a < q_; ++a) ++h[weil_value(s, a)];
    return h;
  }

 private:
  std::uint64_t p_, q_;
  unsigned n_;
  Poly mod_;
  std::uint64_t gen_ = 0;

  static void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }

  std::uint64_t inv_mod_p(std::uint64_t a) const {
    for (std::uint64_t b = 1; b < p_; ++b) {
      if (a * b % p_ == 1) return b;
    }
    return 0;
  }

  // remainder of a mod b over GF(p); b nonzero
  Poly rem(Poly a, Poly b) const {
    trim(a);
    trim(b);
    const std::uint64_t il = inv_mod_p(b.back());
    while (a.size() >= b.size()) {
      const std::uint64_t f = a.back() * il % p_;
      const std::size_t sh = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) {
        a[sh + i] = (a[sh + i] + p_ * p_ - f * b[i] % p_) % p_;
      }
      trim(a);
    }
    return a;
  }

  Poly mulp(const Poly& a, const Poly& b) const {
    Poly r(2 * n_, 0);
    for (unsigned i = 0; i < n_; ++i) {
      for (unsigned j = 0; j < n_; ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p_;
    }
    if (n_ == 1) {
      r.resize(1);
      return r;
    }
    Poly m = rem(r, mod_);
    m.resize(n_, 0);
    return m;
  }

  bool irreducible(const Poly& f) const {
    // trial division by every monic polynomial of degree 1..n/2
    for (unsigned d = 1; 2 * d <= n_; ++d) {
      std::uint64_t count = 1;
      for (unsigned i = 0; i < d; ++i) count *= p_;
      for (std::uint64_t e = 0; e < count; ++e) {
        Poly g(d + 1, 0);
        std::uint64_t t = e;
        for (unsigned i = 0; i < d; ++i) {
          g[i] = t % p_;
          t /= p_;
        }
        g[d] = 1;
        if (rem(f, g).empty()) return false;
      }
    }
    return true;
  }

  void find_modulus() {
    if (n_ == 1) {
      mod_ = {0, 1};
      return;
    }
    // lexicographic on (c0, c1, ..., c_{n-1})
    std::vector<std::uint64_t> c(n_, 0);
    for (;;) {
      Poly f(c.begin(), c.end());
      f.push_back(1);
      if (irreducible(f)) {
        mod_ = f;
        return;
      }
      int i = static_cast<int>(n_) - 1;
      while (i >= 0 && ++c[i] == p_) c[i--] = 0;
    }
  }

  void find_generator() {
    for (std::uint64_t a = 1; a < q_; ++a) {
      std::uint64_t x = a, ord = 1;
      while (x != 1) {
        x = mul(x, a);
        ++ord;
      }
      if (ord == q_ - 1) {
        gen_ = a;
        return;
      }
    }
  }
};

}  // namespace oracle
