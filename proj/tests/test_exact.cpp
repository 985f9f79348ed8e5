// SPDX-License-Identifier: Apache-2.0

#include <boost/multiprecision/cpp_int.hpp>

#include <random>

#include "catch_amalgamated.hpp"
#include "cpac/exact.hpp"

using namespace cpac;
using boost::multiprecision::cpp_rational;

namespace {

cpp_rational as_ref(const Rational& q) { return cpp_rational(q.numerator(), q.denominator()); }

Rational random_rational(std::mt19937_64& g) {
  long long n = static_cast<long long>(g() % 2001) - 1000;
  long long d = static_cast<long long>(g() % 999) + 1;
  return Rational(n, d);
}

bool canonical(const Rational& q) {
  return q.denominator() > 0 && boost::multiprecision::gcd(q.numerator(), q.denominator()) == 1;
}

// floor(sqrt(2) 2^k) by bisection, independent of the Newton routine.
BigInt sqrt2_bisect(unsigned k) {
  BigInt target = BigInt(2) << (2 * k);
  BigInt lo = BigInt(1) << k, hi = BigInt(2) << k;
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    (mid * mid <= target ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

TEST_CASE("rational arithmetic matches cpp_rational and stays canonical") {
  std::mt19937_64 g(7);
  for (int t = 0; t < 2000; ++t) {
    Rational a = random_rational(g), b = random_rational(g);
    CHECK(as_ref(a + b) == as_ref(a) + as_ref(b));
    CHECK(as_ref(a - b) == as_ref(a) - as_ref(b));
    CHECK(as_ref(a * b) == as_ref(a) * as_ref(b));
    if (!b.is_zero()) {
      CHECK(as_ref(a / b) == as_ref(a) / as_ref(b));
      CHECK(canonical(a / b));
    }
    CHECK(((a < b) == (as_ref(a) < as_ref(b))));
    CHECK(canonical(a + b));
    CHECK(canonical(a - b));
    CHECK(canonical(a * b));
  }
}

TEST_CASE("rational parse accepts only p/q") {
  CHECK(Rational::parse("1/10") == Rational(1, 10));
  CHECK(Rational::parse("-6/4") == Rational(-3, 2));
  CHECK_THROWS_AS(Rational::parse("0.1"), ConfigError);
  CHECK_THROWS_AS(Rational::parse("3"), ConfigError);
  CHECK_THROWS_AS(Rational::parse("1/0"), ConfigError);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(7, 2).floor() == 3);
}

TEST_CASE("real_from_rational") {
  auto x = real_from_rational(Rational(1, 3));
  CHECK(x.approximant(5) == Rational(1, 3));
  auto z = real_from_rational(Rational(0));
  CHECK(z.interval(3) == DyadicInterval(Rational(-1, 8), Rational(1, 8)));
  CHECK((x.approximant(2) - x.approximant(7)).abs() < pow2(-2));
}

TEST_CASE("the coded irrational agrees with a bisection oracle") {
  for (unsigned k : {1U, 2U, 10U, 63U, 200U, 1024U, 1100U}) {
    CHECK(detail::sqrt2_scaled(k) == sqrt2_bisect(k));
  }
  // sqrt(2) - 1 = 0.0110101000001001111...b
  CHECK(coded_irrational_truncation(8) == Rational(106, 256));
}

TEST_CASE("generic_real examples") {
  CHECK(compare_gt(generic_real(Rational(1, 2), 8), Rational(1, 2), 64) == Tri::true_);
  CHECK(compare_gt(generic_real(Rational(1, 2), 8), Rational(3, 4), 64) == Tri::false_);
  CHECK(compare_gt(generic_real(Rational(1, 3), 10), Rational(1, 3)) == Tri::true_);
  CHECK_THROWS(generic_real(Rational(0), 0));
}

TEST_CASE("compare_gt examples") {
  CHECK(compare_gt(real_from_rational(Rational(3, 4)), Rational(1, 2), 64) == Tri::true_);
  for (unsigned cap : {1U, 8U, 64U, 200U}) {
    CHECK(compare_gt(real_from_rational(Rational(1, 2)), Rational(1, 2), cap) == Tri::unresolved);
  }
}

TEST_CASE("rapid Cauchy property of the stream constructors") {
  std::mt19937_64 g(11);
  std::vector<RealStream> streams{real_from_rational(Rational(5, 7)), generic_real(Rational(-3, 4), 1),
                                  generic_real(Rational(1, 3), 10), generic_real(Rational(0), 30)};
  for (const auto& x : streams) {
    for (int t = 0; t < 1000; ++t) {
      unsigned i = static_cast<unsigned>(g() % 40);
      unsigned j = i + 1 + static_cast<unsigned>(g() % (40 - i));
      REQUIRE((x.approximant(i) - x.approximant(j)).abs() < pow2(-static_cast<long long>(i)));
      REQUIRE(x.interval(i).intersects(x.interval(j)));
    }
  }
}

TEST_CASE("compare_gt answers never flip as the cap grows") {
  std::mt19937_64 g(13);
  for (int t = 0; t < 200; ++t) {
    Rational q = random_rational(g);
    RealStream x = generic_real(random_rational(g), 1 + static_cast<unsigned>(g() % 12));
    std::optional<Tri> first;
    for (unsigned cap = 1; cap <= 80; ++cap) {
      Tri r = compare_gt(x, q, cap);
      if (first) {
        REQUIRE(r == *first);
      } else if (r != Tri::unresolved) {
        first = r;
      }
    }
  }
}

TEST_CASE("generic reals separate from every rational of bounded denominator") {
  for (unsigned s = 3; s <= 10; ++s) {
    const long long max_den = std::min<long long>(1LL << (s - 2), 24);
    for (long long qn = -4; qn <= 4; ++qn) {
      RealStream x = generic_real(Rational(qn, 4), s);
      for (long long b = 1; b <= max_den; ++b) {
        for (long long a = -3 * b; a <= 3 * b; ++a) {
          REQUIRE(compare_gt(x, Rational(a, b), 4 * s) != Tri::unresolved);
        }
      }
    }
  }
}

TEST_CASE("extended real classification") {
  ExtendedReal inf([](unsigned i) { return Rational(static_cast<long long>(i) + 1); });
  CHECK(std::holds_alternative<ExtendedReal::InfiniteSoFar>(extended_real_classify(inf, 10)));

  ExtendedReal five([](unsigned) { return Rational(5); });
  auto c = extended_real_classify(five, 10);
  REQUIRE(std::holds_alternative<ExtendedReal::FiniteSoFar>(c));
  CHECK(std::get<ExtendedReal::FiniteSoFar>(c).interval == DyadicInterval(Rational(5) - pow2(-10), Rational(5) + pow2(-10)));

  ExtendedReal flip([](unsigned i) { return Rational(static_cast<long long>(i % 2)); });
  CHECK_THROWS_AS(extended_real_classify(flip, 2), InvalidPresentation);

  CHECK(ExtendedReal::infinity().is_exact_infinity());
  CHECK(*max(ExtendedReal::finite(2), ExtendedReal::finite(3)).exact_value() == Rational(3));
}

TEST_CASE("dyadic intervals") {
  DyadicInterval a(Rational(0), Rational(1));
  DyadicInterval b(Rational(1, 4), Rational(1, 2));
  CHECK(a.contains(b));
  CHECK(a.width() == Rational(1));
  CHECK(a.intersects(DyadicInterval(Rational(1), Rational(2))));
  CHECK_FALSE(b.intersects(DyadicInterval(Rational(3, 4), Rational(1))));
  CHECK_THROWS(DyadicInterval(Rational(1), Rational(0)));
}
