#include <gtest/gtest.h>

#include <map>

#include "support/brute_field.hpp"
#include "weilscope/exponent.hpp"
#include "weilscope/weil.hpp"

using namespace weilscope;

namespace {

Element el(std::uint64_t v) { return Element{static_cast<std::uint32_t>(v)}; }

std::map<std::int64_t, std::uint64_t> as_map(const WeilSpectrum& sp) {
  std::map<std::int64_t, std::uint64_t> m;
  for (const auto& e : sp.entries) m[e.value] = e.mult;
  return m;
}

}  // namespace

TEST(Weil, Gf9GoldenFixture) {
  const Field f = Field::build(3, 2);
  const WeilSpectrum sp = spectrum(f, 5);
  EXPECT_EQ(as_map(sp), (std::map<std::int64_t, std::uint64_t>{{-3, 2}, {0, 2}, {3, 3}, {6, 1}}));
  EXPECT_EQ(weil_integer(f, 5, f.one()), 3);
  EXPECT_EQ(weil_integer(f, 5, f.minus_one()), 6);
  EXPECT_EQ(weil_integer(f, 5, f.zero()), 0);
  // vanishing witnesses i and 2i
  EXPECT_EQ(weil_integer(f, 5, f.parse("x")), 0);
  EXPECT_EQ(weil_integer(f, 5, f.parse("2x")), 0);
  const MomentReport m = moments(f, 5);
  EXPECT_EQ(m.m1, 9);
  EXPECT_EQ(m.m2, 81);
  EXPECT_EQ(m.m3, 243);
  EXPECT_EQ(m.r_count, 3u);
  EXPECT_TRUE(m.consistent());
  EXPECT_EQ(kset_count(f, 5, f.one()).size, 4u);
  EXPECT_EQ(kset_count(f, 5, f.zero()).size, 2u);
  EXPECT_EQ(kset_count(f, 5, f.parse("x")).size, 2u);
}

TEST(Weil, OtherGf9Exponents) {
  const Field f = Field::build(3, 2);
  EXPECT_EQ(as_map(spectrum(f, 3)), (std::map<std::int64_t, std::uint64_t>{{0, 7}, {9, 1}}));
  EXPECT_EQ(spectrum(f, 7).entries, spectrum(f, 5).entries);
  EXPECT_EQ(r_count_bruteforce(f, 7), 3u);
}

TEST(Weil, Gf7Counts) {
  const Field f = Field::build(7, 1);
  EXPECT_EQ(weil_sum(f, 5, f.one()).counts, (std::vector<std::uint64_t>{3, 0, 2, 0, 0, 2, 0}));
  EXPECT_FALSE(weil_sum(f, 5, f.one()).is_rational());
  EXPECT_THROW(weil_integer(f, 5, f.one()), NotRationalError);
  try {
    weil_integer(f, 5, f.one());
  } catch (const NotRationalError& e) {
    EXPECT_FALSE(e.internal());
  }
}

TEST(Weil, LargerTowerFixtures) {
  const Field f25 = Field::build(5, 2);
  EXPECT_EQ(as_map(spectrum(f25, 13)),
            (std::map<std::int64_t, std::uint64_t>{{-5, 6}, {0, 10}, {5, 6}, {10, 1}, {15, 1}}));
  EXPECT_EQ(r_count_bruteforce(f25, 13), 7u);
  const Field f49 = Field::build(7, 2);
  EXPECT_EQ(as_map(spectrum(f49, 25)),
            (std::map<std::int64_t, std::uint64_t>{{-7, 12}, {0, 22}, {7, 12}, {21, 1}, {28, 1}}));
}

TEST(Weil, NaiveMatchesOracleHistograms) {
  for (const auto& [p, n, s] : std::vector<std::tuple<std::uint64_t, unsigned, std::uint64_t>>{
           {3, 2, 5}, {3, 2, 7}, {5, 1, 3}, {7, 1, 5}, {2, 4, 7}, {3, 3, 5}, {5, 2, 13}, {3, 4, 11}}) {
    const Field f = Field::build(p, n);
    const oracle::BruteField o(p, n);
    const WeilEvaluator ev(f, s);
    for (std::uint64_t a = 0; a < f.order(); ++a) {
      ASSERT_EQ(ev.naive(el(a)).counts, o.weil_counts(s, a)) << "p=" << p << " n=" << n << " s=" << s << " a=" << a;
    }
  }
}

TEST(Weil, PathsAgreeOnEveryTowerUpTo2401) {
  for (const auto& pp : prime_powers_up_to(49, true)) {
    const Field f = Field::build(pp.p, 2 * pp.m);
    const std::uint64_t P = f.sub_order();
    for (std::uint64_t k = 0; k <= P; ++k) {
      const std::uint64_t s = 1 + k * (P - 1);
      EngineOptions naive, coset;
      naive.path = SumPath::naive;
      coset.path = SumPath::coset;
      ASSERT_EQ(value_table(f, s, naive), value_table(f, s, coset)) << "q=" << f.order() << " k=" << k;
    }
  }
}

TEST(Weil, TransformMatchesNaive) {
  for (const auto& [p, n] : std::vector<std::pair<std::uint64_t, unsigned>>{{2, 6}, {3, 4}, {3, 5}, {5, 3}, {2, 9}}) {
    const Field f = Field::build(p, n);
    ASSERT_TRUE(detail::transform_is_cheaper(f));
    for (std::uint64_t s : {1ull, 5ull, 7ull, 11ull, 13ull}) {
      EngineOptions naive, tr;
      naive.path = SumPath::naive;
      tr.path = SumPath::transform;
      EXPECT_EQ(counts_table(f, s, naive).data, counts_table(f, s, tr).data) << p << "^" << n << " s=" << s;
    }
  }
}

TEST(Weil, Gf28561CosetAgreesWithTransform) {
  const Field f = Field::build(13, 4);
  EngineOptions coset, tr;
  coset.path = SumPath::coset;
  tr.path = SumPath::transform;
  EXPECT_EQ(value_table(f, 841, coset), value_table(f, 841, tr));
}

TEST(Weil, CosetRequiresNormalizedForm) {
  const Field f = Field::build(3, 4);
  EngineOptions coset;
  coset.path = SumPath::coset;
  // 3 = 1 mod 2 (rational) but not 1 mod 8
  EXPECT_THROW(value_table(f, 3, coset), NotNormalizedError);
  EXPECT_NO_THROW(value_table(f, 17, coset));
}

TEST(Weil, KsetIdentity) {
  const Field f = Field::build(3, 4);
  const std::uint64_t s = 1 + 2 * 8;
  for (std::uint64_t a = 0; a < f.order(); a += 3) {
    EXPECT_EQ(weil_via_kset(f, s, el(a)), weil_integer(f, s, el(a)));
  }
  EXPECT_THROW(kset_count(f, 3, f.one()), NotNormalizedError);
}

TEST(Weil, SubfieldDomain) {
  const Field f = Field::build(3, 2);
  const WeilSpectrum sp = spectrum(f, 5, Domain::subfield_units);
  EXPECT_EQ(sp.total(), 2u);
  EXPECT_EQ(as_map(sp), (std::map<std::int64_t, std::uint64_t>{{3, 1}, {6, 1}}));
  EXPECT_THROW(spectrum(Field::build(3, 3), 1, Domain::subfield_units), PreconditionError);
  EXPECT_EQ(parse_domain("Fx"), Domain::subfield_units);
  EXPECT_THROW(parse_domain("Kx"), PreconditionError);
}

TEST(Weil, DigestDependsOnContentOnly) {
  const Field f = Field::build(5, 2);
  const WeilSpectrum a = spectrum(f, 13);
  EngineOptions eo;
  eo.jobs = 4;
  eo.path = SumPath::naive;
  const WeilSpectrum b = spectrum(f, 13, Domain::all_units, eo);
  EXPECT_EQ(spectrum_digest(a), spectrum_digest(b));
  EXPECT_NE(spectrum_digest(a), spectrum_digest(spectrum(f, 17)));
  EXPECT_EQ(spectrum_digest(a).size(), 16u);
}

TEST(Weil, FirstNonrational) {
  const Field f = Field::build(7, 2);
  EXPECT_FALSE(first_nonrational(f, 25).has_value());
  const auto w = first_nonrational(f, 5);
  ASSERT_TRUE(w.has_value());
  EXPECT_FALSE(weil_sum(f, 5, *w).is_rational());
  for (std::uint64_t a = 1; a < w->value; ++a) EXPECT_TRUE(weil_sum(f, 5, el(a)).is_rational());
}

TEST(Weil, DistinctValuesEarlyExit) {
  const Field f = Field::build(5, 2);
  EXPECT_EQ(distinct_values(f, 13, Domain::all_units), 5u);
  EXPECT_EQ(distinct_values(f, 13, Domain::all_units, 3), 4u);
  EXPECT_EQ(distinct_values(f, 5, Domain::all_units), 2u);  // 5 = p, degenerate
}

TEST(Weil, OrbitSums) {
  const Field f = Field::build(3, 2);
  EXPECT_EQ(orbit_sum(f, 5, el(3)), 0);
  EXPECT_EQ(orbit_sum(f, 5, el(4)), 0);
  EXPECT_EQ(orbit_sum(f, 5, el(1)), 9);
  EXPECT_THROW(orbit_sum(f, 5, f.zero()), PreconditionError);
  EXPECT_THROW(orbit_sum(Field::build(3, 3), 1, Element{1}), NotNormalizedError);
}

TEST(Weil, MomentsRejectNonInvertible) {
  const Field f = Field::build(5, 2);
  EXPECT_THROW(moments(f, 9), PreconditionError);  // gcd(9, 24) = 3
}
