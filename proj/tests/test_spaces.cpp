// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "catch_amalgamated.hpp"
#include "cpac/spaces.hpp"

using namespace cpac;

namespace {

Rational exact(const ExtendedReal& d) {
  REQUIRE(d.exact_value().has_value());
  return *d.exact_value();
}

// Interval bounds of d at a fixed evaluation depth (nullopt: infinite).
std::optional<DyadicInterval> bounds(const ExtendedReal& d, unsigned depth = 40) {
  if (d.is_exact_infinity()) return std::nullopt;
  if (d.exact_value()) return DyadicInterval(*d.exact_value(), *d.exact_value());
  auto c = d.classify(depth);
  if (std::holds_alternative<ExtendedReal::InfiniteSoFar>(c)) return std::nullopt;
  return std::get<ExtendedReal::FiniteSoFar>(c).interval;
}

template <class Ideal>
void check_metric_axioms(const MetricSpace<Ideal>& M, std::uint64_t id_range, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  for (int t = 0; t < 1000; ++t) {
    IdealId i{g() % id_range}, j{g() % id_range}, k{g() % id_range};
    auto dij = bounds(M.ideal_distance(i, j));
    auto dji = bounds(M.ideal_distance(j, i));
    auto dii = bounds(M.ideal_distance(i, i));
    REQUIRE(dii);
    REQUIRE(dii->lo <= Rational(0));
    REQUIRE(dii->hi >= Rational(0));
    REQUIRE(dij.has_value() == dji.has_value());
    if (dij) REQUIRE(dij->intersects(*dji));
    auto dik = bounds(M.ideal_distance(i, k));
    auto djk = bounds(M.ideal_distance(j, k));
    // Triangle: lo(d(i,k)) <= hi(d(i,j)) + hi(d(j,k)); vacuous when the right side is infinite.
    if (dij && djk) {
      REQUIRE(dik.has_value());
      REQUIRE(dik->lo <= dij->hi + djk->hi);
    }
  }
}

}  // namespace

TEST_CASE("pairing and sequence codes are bijections") {
  std::mt19937_64 g(3);
  for (int t = 0; t < 10000; ++t) {
    std::uint64_t a = g() % 100000, b = g() % 100000;
    auto [x, y] = unpair(pair(a, b));
    REQUIRE(x == a);
    REQUIRE(y == b);
  }
  for (std::uint64_t n = 0; n < 5000; ++n) {
    auto [a, b] = unpair(n);
    REQUIRE(pair(a, b) == n);
    REQUIRE(list_code(list_decode(n)) == n);
    REQUIRE(finite_support_code(finite_support_decode(n)) == n);
    REQUIRE(binary_support_code(binary_support_decode(n)) == n);
    REQUIRE(word_code(word_decode(n, 3), 3) == n);
    REQUIRE(unpair(Natural(n)).first == Natural(a));
    REQUIRE(unzigzag(zigzag(BigInt(n) - 2500)) == BigInt(n) - 2500);
  }
  CHECK(pair(std::uint64_t{2}, std::uint64_t{3}) == 18);
  CHECK(list_decode(0).empty());
  CHECK(list_decode(1) == std::vector<std::uint64_t>{0});
  CHECK(list_decode(2) == std::vector<std::uint64_t>{1});
  CHECK(list_decode(3) == (std::vector<std::uint64_t>{0, 0}));
  CHECK_THROWS_AS(list_code(std::vector<std::uint64_t>(65, 0)), std::overflow_error);
}

TEST_CASE("discrete spaces") {
  auto D = discrete_space({4, 9, 2, 7});
  CHECK(exact(D.distance(3, 3)) == Rational(0));
  CHECK(exact(D.distance(2, 5)) == Rational(1));
  CHECK(exact(D.ideal_distance(IdealId{0}, IdealId{1})) == Rational(1));
  CHECK(D.ideal(IdealId{2}) == 2);
  CHECK_THROWS_AS(D.ideal(IdealId{4}), std::out_of_range);
  CHECK_THROWS_AS(discrete_space({1, 2, 1}), DuplicateElement);
  check_metric_axioms(D, 4, 1);
  check_metric_axioms(discrete_naturals(), 1000, 2);
}

TEST_CASE("Baire and Cantor distances") {
  auto B = baire_space();
  CHECK(exact(B.distance({}, {0, 1})) == Rational(1, 2));
  CHECK(exact(B.distance({0, 3, 4}, {0, 3, 4})) == Rational(0));
  CHECK(exact(B.distance({5}, {7})) == Rational(1));
  // trailing zeros do not change the point
  CHECK(exact(B.distance({1, 0, 0}, {1})) == Rational(0));
  CHECK(B.ideal(IdealId{finite_support_code({2, 0, 3})}) == FiniteSequence{2, 0, 3});
  check_metric_axioms(B, 1 << 16, 3);
  auto C = cantor_space();
  CHECK(C.ideal(IdealId{5}) == FiniteSequence{1, 0, 1});
  check_metric_axioms(C, 1 << 16, 4);
}

TEST_CASE("real line") {
  auto R = real_line();
  CHECK(R.ideal(IdealId{0}) == Rational(0));
  CHECK(R.ideal(IdealId{3}) == Rational(1, 2));
  CHECK(exact(R.distance(Rational(1, 3), Rational(-1, 6))) == Rational(1, 2));
  check_metric_axioms(R, 4096, 5);
  CHECK_THROWS_AS(RationalEnumeration({Rational(1), Rational(2), Rational(1)}), DuplicateElement);
}

TEST_CASE("enumerations of the rationals") {
  auto d = RationalEnumeration::diagonal(12);
  std::vector<Rational> want{0, 1, -1, Rational(1, 2), Rational(-1, 2), 2, -2, Rational(1, 3), Rational(-1, 3),
                             Rational(2, 3), Rational(-2, 3), Rational(3, 2)};
  CHECK(d.values() == want);
  auto t = RationalEnumeration::third_first(12);
  CHECK(t.at(IdealId{0}) == Rational(1, 3));
  CHECK(t.at(IdealId{1}) == Rational(0));
  CHECK(t.size() == 12);
  CHECK(*RationalEnumeration::diagonal().index_of(Rational(1, 2)) == IdealId{3});
}

TEST_CASE("products") {
  auto A = discrete_naturals();
  auto P = product_space(A, A);
  auto x = P.ideal(IdealId{pair(std::uint64_t{2}, std::uint64_t{3})});
  CHECK(x == std::pair<std::uint64_t, std::uint64_t>{2, 3});
  CHECK(exact(P.distance({2, 3}, {2, 3})) == Rational(0));
  CHECK(exact(P.distance({2, 3}, {4, 5})) == Rational(1));
  CHECK(exact(P.distance({2, 3}, {2, 5})) == Rational(1));
  check_metric_axioms(P, 5000, 6);

  auto F = product_space(discrete_space({1, 2, 3}), discrete_space({7, 8}));
  CHECK(F.ideal_count() == std::optional<std::uint64_t>(6));
  CHECK(F.ideal(IdealId{5}) == std::pair<std::uint64_t, std::uint64_t>{3, 8});

  auto BR = product_space(baire_space(), real_line());
  CHECK(exact(BR.distance({{0, 1}, Rational(0)}, {{0}, Rational(1, 8)})) == Rational(1, 2));
  check_metric_axioms(BR, 5000, 7);
}

TEST_CASE("finite-sequence spaces") {
  auto S = finseq_space(discrete_naturals());
  CHECK(S.distance({3}, {3, 4}).is_exact_infinity());
  CHECK(exact(S.distance({}, {})) == Rational(0));
  CHECK(exact(S.distance({1}, {2})) == Rational(1));
  CHECK(exact(S.distance({1, 2}, {1, 2})) == Rational(0));
  std::mt19937_64 g(9);
  for (int t = 0; t < 1000; ++t) {
    auto a = S.ideal(IdealId{g() % 4096});
    auto b = S.ideal(IdealId{g() % 4096});
    REQUIRE(S.distance(a, b).is_exact_infinity() == (a.size() != b.size()));
  }
  check_metric_axioms(S, 4096, 8);
  auto W = finseq_space(discrete_space({5, 6}));
  CHECK(W.ideal(IdealId{0}).empty());
  CHECK(W.ideal(IdealId{4}) == std::vector<std::uint64_t>{6, 5});
  auto BS = finseq_space(baire_space());
  check_metric_axioms(BS, 4096, 10);
}

TEST_CASE("point distances") {
  auto R = real_line();
  auto x = real_point(generic_real(Rational(1, 3), 4));
  for (unsigned prec : {1U, 5U, 20U}) {
    auto d = point_distance(R, x, x, prec);
    REQUIRE(d);
    CHECK(d->contains(Rational(0)));
    CHECK(d->hi <= pow2(-static_cast<long long>(prec) + 2));
  }
  auto y = real_point(generic_real(Rational(1), 4));
  auto dxy = point_distance(R, x, y, 10);
  REQUIRE(dxy);
  CHECK(dxy->contains(Rational(2, 3)));
  CHECK(dxy->width() <= pow2(-8));

  auto D = discrete_space({0, 1, 2, 3});
  auto p = PointDescription<std::uint64_t>::constant(1);
  auto q = PointDescription<std::uint64_t>::constant(3);
  auto dd = point_distance(D, p, q, 4);
  REQUIRE(dd);
  CHECK(*dd == DyadicInterval(Rational(1), Rational(1)));

  auto B = baire_space();
  auto s = sequence_point([](std::size_t k) { return k == 5 ? 1 : 0; });
  auto t = sequence_point([](std::size_t k) { return k == 2 ? 9 : (k == 5 ? 1 : 0); });
  auto db = point_distance(B, s, t, 6);
  REQUIRE(db);
  CHECK(*db == DyadicInterval(Rational(1, 4), Rational(1, 4)));

  auto Sq = finseq_space(discrete_naturals());
  auto u = PointDescription<std::vector<std::uint64_t>>::constant({1});
  auto v = PointDescription<std::vector<std::uint64_t>>::constant({1, 2});
  CHECK_FALSE(point_distance(Sq, u, v, 3).has_value());
}

TEST_CASE("point descriptions are rapid Cauchy") {
  std::mt19937_64 g(12);
  auto R = real_line();
  auto B = baire_space();
  auto x = real_point(generic_real(Rational(-5, 7), 3));
  auto s = sequence_point([](std::size_t k) { return (k * k) % 5; });
  for (int t = 0; t < 1000; ++t) {
    unsigned i = static_cast<unsigned>(g() % 40);
    unsigned j = i + 1 + static_cast<unsigned>(g() % (40 - i));
    REQUIRE(rapid_cauchy_at(R, x, i, j));
    REQUIRE(rapid_cauchy_at(B, s, i, j));
  }
}
