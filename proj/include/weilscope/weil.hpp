#pragma once

// Exact Weil sums W_s(a) = sum_x mu(x^s - a x) over a table-driven field.
//
// A Weil sum is kept as its count histogram c_t = #{x : Tr(x^s - a x) = t},
// which is the sum c_0 + c_1 z + ... + c_{p-1} z^{p-1} in Z[z], z = e^{2 pi i/p}.
// Because sum_t z^t = 0 and sum_t c_t = q is fixed, two sums are equal iff
// their histograms are equal, and a sum is a rational integer iff
// c_1 = ... = c_{p-1}, in which case it equals c_0 - c_1.
//
// Three evaluation paths:
//   naive      O(q) per a, any exponent.
//   coset      O(p^n) per a over GF(p^{2n}) for s = 1 (mod p^n - 1): counts the
//              coset representatives g^i, i in [0, p^n], with relative trace of
//              x^s - a x equal to zero; W = p^n * count - p^n.
//   transform  all a at once in O(n q p^2) by an additive Fourier transform over
//              GF(p)^n, for fields with small characteristic.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weilscope/errors.hpp"
#include "weilscope/field.hpp"
#include "weilscope/number_theory.hpp"
#include "weilscope/parallel.hpp"

namespace weilscope {

struct CyclotomicCounts {
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
  bool is_rational() const {
    for (std::size_t t = 2; t < counts.size(); ++t) {
      if (counts[t] != counts[1]) return false;
    }
    return true;
  }
  /// c_0 - c_1. Throws NotRationalError (internal) when not rational: callers
  /// check the exponent first, so reaching this with a bad histogram is a bug.
  std::int64_t rational_value() const {
    if (!is_rational()) {
      throw NotRationalError("Weil sum histogram is not rational", true);
    }
    return static_cast<std::int64_t>(counts[0]) - static_cast<std::int64_t>(counts[1]);
  }
  friend bool operator==(const CyclotomicCounts&, const CyclotomicCounts&) = default;
};

enum class Domain { all_units, subfield_units };

inline std::string_view domain_tag(Domain d) {
  return d == Domain::all_units ? "Lx" : "Fx";
}
inline Domain parse_domain(std::string_view tag) {
  if (tag == "Lx" || tag == "L") return Domain::all_units;
  if (tag == "Fx" || tag == "F") return Domain::subfield_units;
  throw PreconditionError("unknown domain '" + std::string(tag) + "' (use Lx or Fx)");
}

enum class SumPath { automatic, naive, coset, transform };

struct EngineOptions {
  SumPath path = SumPath::automatic;
  unsigned jobs = 1;
};

inline bool is_rational_exponent(const Field& f, std::uint64_t s) {
  return s >= 1 && (s - 1) % (f.characteristic() - 1) == 0;
}
inline bool is_invertible_exponent(const Field& f, std::uint64_t s) {
  return std::gcd(s, f.unit_order()) == 1;
}
/// s = 1 (mod p^{n/2} - 1) over an even-degree field.
inline bool is_normalized_niho_form(const Field& f, std::uint64_t s) {
  return f.has_tower() && s >= 1 && (s - 1) % (f.sub_order() - 1) == 0;
}

/// Nonzero elements of the subfield GF(p^{n/2}) in increasing log order.
inline std::vector<Element> subfield_units(const Field& f) {
  const std::uint64_t P = f.sub_order();
  std::vector<Element> out;
  out.reserve(P - 1);
  for (std::uint64_t j = 0; j + 1 < P; ++j) {
    out.push_back(f.exp(static_cast<std::int64_t>(j * (P + 1))));
  }
  return out;
}

/// Precomputed per-exponent state for repeated Weil sum evaluation.
class WeilEvaluator {
 public:
  WeilEvaluator(const Field& f, std::uint64_t s) : f_(&f), s_(s) {
    if (s == 0) throw PreconditionError("exponent must be positive");
    const std::uint64_t m = f.unit_order();
    const auto antilog = f.antilog_table();
    const auto trace = f.abs_trace_table();
    power_trace_.resize(m);
    log_trace_.resize(m);
    const std::uint64_t step = s % m;
    std::uint64_t e = 0;
    for (std::uint64_t j = 0; j < m; ++j) {
      power_trace_[j] = trace[antilog[e]];
      log_trace_[j] = trace[antilog[j]];
      e += step;
      if (e >= m) e -= m;
    }
    if (is_normalized_niho_form(f, s)) {
      const std::uint64_t P = f.sub_order();
      rep_power_log_.resize(P + 1);
      for (std::uint64_t i = 0; i <= P; ++i) rep_power_log_[i] = mul_mod(i, s, m);
    }
  }

  const Field& field() const { return *f_; }
  std::uint64_t exponent() const { return s_; }
  bool coset_ready() const { return !rep_power_log_.empty(); }

  /// Histogram of Tr(x^s - a x) over every x in the field.
  CyclotomicCounts naive(Element a) const {
    const std::uint64_t p = f_->characteristic();
    const std::uint64_t m = f_->unit_order();
    CyclotomicCounts out{std::vector<std::uint64_t>(p, 0)};
    out.counts[0] = 1;  // x = 0
    if (a.is_zero()) {
      for (std::uint64_t j = 0; j < m; ++j) ++out.counts[power_trace_[j]];
      return out;
    }
    const std::uint64_t la = f_->log(a);
    auto accumulate = [&](std::uint64_t j0, std::uint64_t j1, std::uint64_t offset) {
      for (std::uint64_t j = j0; j < j1; ++j) {
        std::uint64_t t = power_trace_[j] + p - log_trace_[j + offset];
        if (t >= p) t -= p;
        ++out.counts[t];
      }
    };
    accumulate(0, m - la, la);
    accumulate(m - la, m, la - m);  // unsigned wrap is intended: j + la - m
    return out;
  }

  std::int64_t naive_integer(Element a) const { return naive(a).rational_value(); }

  /// Number of coset representatives g^i, i in [0, p^n], with
  /// Tr_{L/F}(x^s - a x) = 0.
  std::uint64_t kset_reps(Element a) const {
    if (!coset_ready()) {
      throw NotNormalizedError("exponent " + std::to_string(s_) +
                               " is not 1 mod (p^n - 1) over this tower");
    }
    const std::uint64_t m = f_->unit_order();
    const std::uint64_t P = f_->sub_order();
    const auto zech = f_->zech_table();
    std::uint64_t count = 0;
    if (a.is_zero()) {
      for (std::uint64_t i = 0; i <= P; ++i) {
        count += f_->rel_trace_zero_log(rep_power_log_[i]);
      }
      return count;
    }
    const std::uint64_t la = f_->log(a);
    const std::uint64_t minus = f_->log_minus_one();
    for (std::uint64_t i = 0; i <= P; ++i) {
      const std::uint64_t e1 = rep_power_log_[i];
      const std::uint64_t e2 = (la + i) % m;
      if (e1 == e2) {  // x^s - a x = 0
        ++count;
        continue;
      }
      // g^e1 - g^e2 = g^e1 (1 + g^{e2 - e1 + log(-1)})
      const std::uint64_t d = (e2 + m - e1 + minus) % m;
      const std::uint64_t ly = (e1 + zech[d]) % m;
      count += f_->rel_trace_zero_log(ly);
    }
    return count;
  }

  std::int64_t coset_value(Element a) const {
    const auto P = static_cast<std::int64_t>(f_->sub_order());
    return P * static_cast<std::int64_t>(kset_reps(a)) - P;
  }

 private:
  const Field* f_;
  std::uint64_t s_;
  std::vector<std::uint32_t> power_trace_;  // Tr(g^{j s})
  std::vector<std::uint32_t> log_trace_;    // Tr(g^j)
  std::vector<std::uint64_t> rep_power_log_;  // i s mod (q-1), i in [0, p^n]
};

// ---------------------------------------------------------------------------
// Single-point operations

inline CyclotomicCounts weil_sum(const Field& f, std::uint64_t s, Element a) {
  return WeilEvaluator(f, s).naive(a);
}

/// Rational integer value of W_s(a). Requires s = 1 (mod p-1).
inline std::int64_t weil_integer(const Field& f, std::uint64_t s, Element a) {
  if (!is_rational_exponent(f, s)) {
    throw NotRationalError("exponent " + std::to_string(s) +
                               " is not 1 mod (p-1); Weil sums are not all rational",
                           false);
  }
  return weil_sum(f, s, a).rational_value();
}

struct KCount {
  std::uint64_t size = 0;             // |K_{a,s}|
  std::uint64_t coset_zero_reps = 0;  // |K_{a,s}| / (p^n - 1)
};

inline KCount kset_count(const Field& f, std::uint64_t s, Element a) {
  if (!is_normalized_niho_form(f, s)) {
    throw NotNormalizedError("exponent " + std::to_string(s) +
                             " is not 1 mod (p^n - 1) over an even-degree field");
  }
  const std::uint64_t c = WeilEvaluator(f, s).kset_reps(a);
  return {c * (f.sub_order() - 1), c};
}

/// p^n |K| / (p^n - 1) - p^n.
inline std::int64_t weil_via_kset(const Field& f, std::uint64_t s, Element a) {
  const KCount k = kset_count(f, s, a);
  const auto P = static_cast<std::int64_t>(f.sub_order());
  return P * static_cast<std::int64_t>(k.coset_zero_reps) - P;
}

// ---------------------------------------------------------------------------
// Whole-field tables

/// Count histograms for every a, stored flat with stride p.
struct CountsTable {
  std::uint64_t p = 0;
  std::vector<std::uint32_t> data;

  std::size_t size() const { return p == 0 ? 0 : data.size() / p; }
  CyclotomicCounts at(Element a) const {
    CyclotomicCounts c{std::vector<std::uint64_t>(p)};
    for (std::uint64_t t = 0; t < p; ++t) c.counts[t] = data[a.value * p + t];
    return c;
  }
};

namespace detail {

inline bool transform_is_cheaper(const Field& f) {
  const std::uint64_t p = f.characteristic();
  const std::uint64_t q = f.order();
  return f.degree() >= 2 && f.degree() * p * p < q && q * p <= (std::uint64_t{1} << 28);
}

// H[y][t] = #{x : Tr(x^s) - <y, x> = t} by a radix-p transform over the
// polynomial coordinates of x, then W(a) = H[T a] where T is the trace form
// T_ij = Tr(x^i x^j).
inline CountsTable transform_counts(const Field& f, std::uint64_t s) {
  const std::uint64_t p = f.characteristic();
  const std::uint64_t q = f.order();
  const unsigned n = f.degree();
  std::vector<std::uint32_t> h(q * p, 0);
  for (std::uint64_t x = 0; x < q; ++x) {
    const Element e{static_cast<std::uint32_t>(x)};
    h[x * p + f.trace_abs(f.pow(e, static_cast<std::int64_t>(s)))] = 1;
  }
  std::vector<std::uint32_t> in(p * p), out(p * p);
  std::uint64_t stride = 1;
  for (unsigned dim = 0; dim < n; ++dim) {
    for (std::uint64_t base = 0; base < q; ++base) {
      if ((base / stride) % p != 0) continue;
      for (std::uint64_t d = 0; d < p; ++d) {
        std::copy_n(h.begin() + static_cast<std::ptrdiff_t>((base + d * stride) * p), p,
                    in.begin() + static_cast<std::ptrdiff_t>(d * p));
      }
      std::fill(out.begin(), out.end(), 0);
      for (std::uint64_t y = 0; y < p; ++y) {
        for (std::uint64_t d = 0; d < p; ++d) {
          const std::uint64_t shift = (y * d) % p;
          const std::uint32_t* src = &in[d * p];
          std::uint32_t* dst = &out[y * p];
          for (std::uint64_t t = 0; t < p; ++t) {
            std::uint64_t u = t + shift;
            if (u >= p) u -= p;
            dst[t] += src[u];
          }
        }
      }
      for (std::uint64_t y = 0; y < p; ++y) {
        std::copy_n(out.begin() + static_cast<std::ptrdiff_t>(y * p), p,
                    h.begin() + static_cast<std::ptrdiff_t>((base + y * stride) * p));
      }
    }
    stride *= p;
  }

  // y(a)_j = sum_i a_i Tr(x^i x^j); linear in a, so extend digit by digit.
  std::vector<std::vector<std::uint64_t>> form(n, std::vector<std::uint64_t>(n));
  std::vector<Element> basis(n);
  for (unsigned i = 0; i < n; ++i) {
    basis[i] = Element{static_cast<std::uint32_t>(checked_pow(p, i))};
  }
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) form[i][j] = f.trace_abs(f.mul(basis[i], basis[j]));
  }
  std::vector<std::uint32_t> image(q, 0);
  std::uint64_t block = 1;
  for (unsigned i = 0; i < n; ++i) {
    for (std::uint64_t d = 1; d < p; ++d) {
      for (std::uint64_t r = 0; r < block; ++r) {
        // image(d p^i + r) = image(r) + d * row_i, coordinate-wise mod p
        std::uint64_t y = image[r];
        std::uint64_t result = 0, scale = 1;
        for (unsigned j = 0; j < n; ++j) {
          const std::uint64_t yj = y % p;
          y /= p;
          result += ((yj + d * form[i][j]) % p) * scale;
          scale *= p;
        }
        image[d * block + r] = static_cast<std::uint32_t>(result);
      }
    }
    block *= p;
  }

  CountsTable table{p, std::vector<std::uint32_t>(q * p)};
  for (std::uint64_t a = 0; a < q; ++a) {
    std::copy_n(h.begin() + static_cast<std::ptrdiff_t>(image[a] * p), p,
                table.data.begin() + static_cast<std::ptrdiff_t>(a * p));
  }
  return table;
}

}  // namespace detail

/// Count histograms for every a in the field (naive or transform path).
inline CountsTable counts_table(const Field& f, std::uint64_t s,
                                const EngineOptions& opts = {}) {
  SumPath path = opts.path;
  if (path == SumPath::coset) {
    throw PreconditionError("the coset path yields integer values, not histograms");
  }
  if (path == SumPath::automatic) {
    path = detail::transform_is_cheaper(f) ? SumPath::transform : SumPath::naive;
  }
  if (path == SumPath::transform) return detail::transform_counts(f, s);

  const std::uint64_t p = f.characteristic();
  const std::uint64_t q = f.order();
  CountsTable table{p, std::vector<std::uint32_t>(q * p)};
  const WeilEvaluator ev(f, s);
  parallel_chunks(q, opts.jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      const auto c = ev.naive(Element{static_cast<std::uint32_t>(a)});
      for (std::uint64_t t = 0; t < p; ++t) {
        table.data[a * p + t] = static_cast<std::uint32_t>(c.counts[t]);
      }
    }
  });
  return table;
}

/// Integer Weil values for every a (indexed by encoding).
/// Automatic path: coset when s = 1 mod (p^{n/2} - 1), otherwise transform or
/// naive, whichever is cheaper.
inline std::vector<std::int64_t> value_table(const Field& f, std::uint64_t s,
                                             const EngineOptions& opts = {}) {
  if (!is_rational_exponent(f, s)) {
    throw NotRationalError("exponent " + std::to_string(s) +
                               " is not 1 mod (p-1); Weil sums are not all rational",
                           false);
  }
  SumPath path = opts.path;
  if (path == SumPath::automatic) {
    path = is_normalized_niho_form(f, s) ? SumPath::coset : SumPath::naive;
  }
  const std::uint64_t q = f.order();
  if (path == SumPath::coset) {
    if (!is_normalized_niho_form(f, s)) {
      throw NotNormalizedError("coset path needs s = 1 mod (p^n - 1) over a tower");
    }
    const WeilEvaluator ev(f, s);
    std::vector<std::int64_t> out(q);
    parallel_chunks(q, opts.jobs, [&](std::size_t begin, std::size_t end) {
      for (std::size_t a = begin; a < end; ++a) {
        out[a] = ev.coset_value(Element{static_cast<std::uint32_t>(a)});
      }
    });
    return out;
  }
  EngineOptions sub = opts;
  sub.path = (opts.path == SumPath::automatic) ? SumPath::automatic : path;
  const CountsTable table = counts_table(f, s, sub);
  std::vector<std::int64_t> out(q);
  for (std::uint64_t a = 0; a < q; ++a) {
    out[a] = table.at(Element{static_cast<std::uint32_t>(a)}).rational_value();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectra

struct SpectrumEntry {
  std::int64_t value = 0;
  std::uint64_t mult = 0;
  friend bool operator==(const SpectrumEntry&, const SpectrumEntry&) = default;
};

struct WeilSpectrum {
  std::uint64_t p = 0;
  unsigned degree = 0;
  std::uint64_t s = 0;
  Domain domain = Domain::all_units;
  std::vector<SpectrumEntry> entries;  // ascending by value

  std::size_t distinct() const { return entries.size(); }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& e : entries) t += e.mult;
    return t;
  }
  std::uint64_t multiplicity(std::int64_t v) const {
    for (const auto& e : entries) {
      if (e.value == v) return e.mult;
    }
    return 0;
  }
  bool contains(std::int64_t v) const { return multiplicity(v) > 0; }
  friend bool operator==(const WeilSpectrum&, const WeilSpectrum&) = default;
};

/// Elements of the chosen domain in increasing encoding order (Lx) or
/// increasing log order (Fx).
inline std::vector<Element> domain_elements(const Field& f, Domain d) {
  if (d == Domain::subfield_units) return subfield_units(f);
  std::vector<Element> out;
  out.reserve(f.unit_order());
  for (std::uint64_t a = 1; a < f.order(); ++a) {
    out.push_back(Element{static_cast<std::uint32_t>(a)});
  }
  return out;
}

inline WeilSpectrum spectrum_from_table(const Field& f, std::uint64_t s, Domain d,
                                        const std::vector<std::int64_t>& values) {
  std::map<std::int64_t, std::uint64_t> hist;
  for (Element a : domain_elements(f, d)) ++hist[values[a.value]];
  WeilSpectrum out{f.characteristic(), f.degree(), s, d, {}};
  for (const auto& [v, m] : hist) out.entries.push_back({v, m});
  return out;
}

inline WeilSpectrum spectrum(const Field& f, std::uint64_t s,
                             Domain d = Domain::all_units,
                             const EngineOptions& opts = {}) {
  if (d == Domain::subfield_units && !f.has_tower()) {
    throw PreconditionError("Fx domain needs an even-degree field");
  }
  return spectrum_from_table(f, s, d, value_table(f, s, opts));
}

/// FNV-1a 64 over a canonical text form; hex string.
inline std::string spectrum_digest(const WeilSpectrum& sp) {
  std::string canon = "p=" + std::to_string(sp.p) + ";degree=" + std::to_string(sp.degree) +
                      ";s=" + std::to_string(sp.s) + ";domain=" +
                      std::string(domain_tag(sp.domain)) + ";";
  for (const auto& e : sp.entries) {
    canon += std::to_string(e.value) + ":" + std::to_string(e.mult) + ";";
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

/// First a (in encoding order) whose Weil sum is not rational, if any.
/// Stops at the first witness; uses the transform table when that is cheaper
/// than q naive evaluations.
inline std::optional<Element> first_nonrational(const Field& f, std::uint64_t s,
                                                const EngineOptions& opts = {}) {
  if (opts.path == SumPath::transform ||
      (opts.path == SumPath::automatic && detail::transform_is_cheaper(f))) {
    const CountsTable table = detail::transform_counts(f, s);
    for (std::uint64_t a = 1; a < f.order(); ++a) {
      const Element e{static_cast<std::uint32_t>(a)};
      if (!table.at(e).is_rational()) return e;
    }
    return std::nullopt;
  }
  const WeilEvaluator ev(f, s);
  for (std::uint64_t a = 1; a < f.order(); ++a) {
    const Element e{static_cast<std::uint32_t>(a)};
    if (!ev.naive(e).is_rational()) return e;
  }
  return std::nullopt;
}

/// Number of distinct Weil values (as algebraic integers) over the domain.
/// With limit > 0 the scan stops as soon as more than `limit` values are
/// seen and returns limit + 1.
inline std::size_t distinct_values(const Field& f, std::uint64_t s, Domain d,
                                   std::size_t limit = 0) {
  std::vector<std::vector<std::uint64_t>> seen;
  auto note = [&](std::vector<std::uint64_t>&& c) {
    if (std::find(seen.begin(), seen.end(), c) == seen.end()) seen.push_back(std::move(c));
    return limit > 0 && seen.size() > limit;
  };
  const auto elems = domain_elements(f, d);
  if (limit == 0 && detail::transform_is_cheaper(f)) {
    const CountsTable table = detail::transform_counts(f, s);
    for (Element a : elems) note(table.at(a).counts);
    return seen.size();
  }
  const WeilEvaluator ev(f, s);
  for (Element a : elems) {
    if (note(ev.naive(a).counts)) return limit + 1;
  }
  return seen.size();
}

// ---------------------------------------------------------------------------
// Moments, R-set, orbit sums

/// #{x : (1 - x)^s + x^s - 1 = 0}.
inline std::uint64_t r_count_bruteforce(const Field& f, std::uint64_t s) {
  const auto se = static_cast<std::int64_t>(s);
  std::uint64_t count = 0;
  for (std::uint64_t v = 0; v < f.order(); ++v) {
    const Element x{static_cast<std::uint32_t>(v)};
    const Element lhs = f.add(f.pow(f.sub(f.one(), x), se), f.pow(x, se));
    count += (lhs == f.one());
  }
  return count;
}

struct MomentReport {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  std::int64_t m3 = 0;
  std::uint64_t r_count = 0;
  std::int64_t expected_m1 = 0;
  std::int64_t expected_m2 = 0;
  std::int64_t expected_m3 = 0;

  bool consistent() const {
    return m1 == expected_m1 && m2 == expected_m2 && m3 == expected_m3;
  }
};

inline MomentReport moments_from_table(const Field& f, std::uint64_t s,
                                       const std::vector<std::int64_t>& values) {
  __int128 m1 = 0, m2 = 0, m3 = 0;
  for (std::int64_t w : values) {
    const __int128 v = w;
    m1 += v;
    m2 += v * v;
    m3 += v * v * v;
  }
  const auto narrow = [](__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw Error("moment overflows int64");
    return static_cast<std::int64_t>(v);
  };
  MomentReport r;
  r.m1 = narrow(m1);
  r.m2 = narrow(m2);
  r.m3 = narrow(m3);
  r.r_count = r_count_bruteforce(f, s);
  const __int128 q = f.order();
  r.expected_m1 = narrow(q);
  r.expected_m2 = narrow(q * q);
  r.expected_m3 = narrow(q * q * static_cast<__int128>(r.r_count));
  return r;
}

/// First three power moments over every a in the field (a = 0 included).
inline MomentReport moments(const Field& f, std::uint64_t s,
                            const EngineOptions& opts = {}) {
  if (!is_invertible_exponent(f, s)) {
    throw PreconditionError("moments need an invertible exponent; gcd(" +
                            std::to_string(s) + ", q-1) != 1");
  }
  return moments_from_table(f, s, value_table(f, s, opts));
}

/// sum_{a in F} W_{L,s}(a b), F the half-degree subfield.
inline std::int64_t orbit_sum(const Field& f, std::uint64_t s, Element b) {
  if (!is_normalized_niho_form(f, s)) {
    throw NotNormalizedError("orbit sums need s = 1 mod (p^n - 1) over a tower");
  }
  if (b.is_zero()) throw PreconditionError("orbit sum needs b != 0");
  const WeilEvaluator ev(f, s);
  std::int64_t total = ev.coset_value(f.zero());
  for (Element a : subfield_units(f)) total += ev.coset_value(f.mul(a, b));
  return total;
}

}  // namespace weilscope
