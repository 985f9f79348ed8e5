// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "catch_amalgamated.hpp"
#include "cpac/hypotheses.hpp"
#include "cpac/learners.hpp"

using namespace cpac;

namespace {

PointDescription<Rational> g16(long long j) { return generic_point(Rational(j, 16), 8); }

std::vector<PointDescription<Rational>> generic_pool(long long from, long long to) {
  std::vector<PointDescription<Rational>> pool;
  for (long long j = from; j < to; ++j) pool.push_back(g16(j));
  return pool;
}

// j/16 + (sqrt(2) - 1)/256 > c, decided exactly: with t = 256 (c - j/16),
// either t <= 0 or (t + 1)^2 < 2.
bool generic_above(long long j, const Rational& c) {
  const Rational t = Rational(256) * (c - Rational(j, 16));
  if (t.sign() <= 0) return true;
  return (t + Rational(1)) * (t + Rational(1)) < Rational(2);
}

std::size_t brute_stump_behaviors(const std::vector<long long>& js, const RationalEnumeration& en) {
  std::set<std::vector<int>> seen;
  for (const auto& c : en.values()) {
    std::vector<int> b;
    for (auto j : js) b.push_back(generic_above(j, c) ? 1 : 0);
    seen.insert(b);
  }
  return seen.size();
}

}  // namespace

TEST_CASE("eval on the concrete presentations") {
  auto ap = apply_presentation();
  auto x = cantor_point([](std::size_t k) { return k % 2 == 0 ? 1 : 0; });  // 1, 0, 1, ...
  CHECK(eval(ap, x, PointDescription<std::uint64_t>::constant(2)) == 1);
  CHECK(eval(ap, x, PointDescription<std::uint64_t>::constant(1)) == 0);

  auto st = stump_presentation();
  auto half = PointDescription<Rational>::constant(Rational(1, 2));
  CHECK(eval(st, half, generic_point(Rational(3, 4), 8)) == 1);
  CHECK(eval(st, half, generic_point(Rational(1, 4), 8)) == 0);
  CHECK_THROWS_AS(eval(st, half, PointDescription<Rational>::constant(Rational(1, 2))), PrecisionExhausted);

  auto hc = halting_presentation(32, 1000);
  const std::uint64_t halt = 1, loop = 8;
  CHECK(eval(hc.presentation, PointDescription<std::uint64_t>::constant(halt),
             PointDescription<std::uint64_t>::constant(loop)) == 0);
}

TEST_CASE("stump evaluator at fixed precision") {
  auto st = stump_presentation();
  // feature interval [3/4, 7/8] is the ball of radius 2^-4 around 13/16
  CHECK(st.evaluate(Rational(1, 2), Rational(13, 16), 4) == Resolution::one);
  // [1/4, 3/4]
  CHECK(st.evaluate(Rational(1, 2), Rational(1, 2), 2) == Resolution::unknown);
}

TEST_CASE("apply evaluator needs the coordinate pinned") {
  auto ap = apply_presentation();
  FiniteSequence ones(40, 1);
  CHECK(ap.evaluate(ones, 5, 6) == Resolution::one);
  CHECK(ap.evaluate({}, 0, 1) == Resolution::zero);
  CHECK(ap.evaluate(ones, 7, 3) == Resolution::unknown);
  CHECK(ap.evaluate(ones, 0, 0) == Resolution::unknown);
}

TEST_CASE("halting presentation") {
  auto hc = halting_presentation(64, 2000);
  auto& H = hc.presentation;
  auto pt = [](std::uint64_t n) { return PointDescription<std::uint64_t>::constant(n); };
  for (const auto& e : hc.halting.entries) CHECK(eval(H, pt(e.program), pt(e.program)) == 1);
  // programs 1 ([halt]) and 2 ([inc r0]) halt in 1 and 2 steps
  CHECK(eval(H, pt(1), pt(2)) == 0);
  CHECK(H.budget_relative);
}

TEST_CASE("oracle halting presentation") {
  const Program read{{Instruction::ord(0), Instruction::decjz(0, 3), Instruction::jmp(2)}};
  // halts in 3 + 2 z(0) steps: count z(0) down, then fall off the end
  const Program slow{{Instruction::ord(0), Instruction::decjz(0, 3), Instruction::jmp(1)}};
  std::vector<std::uint64_t> programs{1, 2, read.encode(), slow.encode()};
  auto cls = oracle_halting_presentation(programs, oracle_family(2, 3), 100);
  auto& H = cls.presentation;
  auto idx = [&](std::uint64_t e, const FiniteSequence& z) {
    for (std::size_t k = 0; k < cls.ideals.size(); ++k) {
      if (cls.ideals[k].program == e && cls.ideals[k].oracle == z) return IdealId{k};
    }
    FAIL("ideal missing");
    return IdealId{0};
  };
  // ordered by halt time
  for (std::size_t k = 1; k < cls.ideals.size(); ++k) CHECK(cls.ideals[k - 1].steps <= cls.ideals[k].steps);

  const IdealId w = idx(slow.encode(), {2});
  CHECK(eval_ideal(H, w, oracle_feature_point(slow.encode(), OracleTape{{0, 2}})) == 1);
  CHECK(eval_ideal(H, w, oracle_feature_point(read.encode(), OracleTape{{0, 2}})) == 0);
  // same program, z(0) changes the halt time
  CHECK(eval_ideal(H, w, oracle_feature_point(slow.encode(), OracleTape{{0, 1}})) == 0);
  CHECK(eval_ideal(H, w, oracle_feature_point(slow.encode(), OracleTape{{0, 2}, {1, 2}})) == 1);
  // (e, z) against itself for every ideal
  for (std::size_t k = 0; k < cls.ideals.size(); ++k) {
    const auto& o = cls.ideals[k];
    CHECK(eval_ideal(H, IdealId{k}, oracle_feature_point(o.program, OracleTape::from_sequence(o.oracle))) == 1);
  }
}

TEST_CASE("evaluators are monotone in precision") {
  std::mt19937_64 g(4);
  auto st = stump_presentation();
  auto ap = apply_presentation();
  auto hc = halting_presentation(64, 500);
  int resolved_calls = 0;
  for (int t = 0; t < 1000; ++t) {
    const Rational c = st.index_space.ideal(IdealId{g() % 2000});
    const auto x = generic_point(Rational(static_cast<long long>(g() % 200) - 100, 32), 1 + g() % 10);
    const auto s = binary_support_decode(g() % 4096);
    const std::uint64_t n = g() % 14;
    const std::uint64_t p0 = hc.halting.entries[g() % hc.halting.entries.size()].program;
    const std::uint64_t p1 = g() % 65;
    std::optional<Resolution> a, b, h;
    for (unsigned k = 0; k < 48; ++k) {
      auto ra = st.evaluate(c, x(k), k);
      auto rb = ap.evaluate(s, n, k);
      auto rh = hc.presentation.evaluate(p0, p1, k);
      if (a) REQUIRE(ra == *a);
      else if (ra != Resolution::unknown) a = ra;
      if (b) REQUIRE(rb == *b);
      else if (rb != Resolution::unknown) b = rb;
      if (h) REQUIRE(rh == *h);
      else if (rh != Resolution::unknown) h = rh;
    }
    resolved_calls += a.has_value();
  }
  CHECK(resolved_calls > 900);
}

TEST_CASE("behaviors") {
  auto st = stump_presentation();
  auto U = std::vector{g16(-5), g16(2), g16(9)};
  CHECK(behaviors_on(st, U, 4096).size() == 4);
  CHECK(behaviors_on(st, {g16(3)}, 4096).size() <= 2);
  auto ap = apply_presentation();
  CHECK(behaviors_on(ap, {PointDescription<std::uint64_t>::constant(3)}, 64).size() == 2);
  // nested in the budget
  std::map<Behavior, IdealId> prev;
  for (std::uint64_t b : {1, 4, 16, 64, 256}) {
    auto cur = behaviors_on(st, U, b);
    for (const auto& [beh, id] : prev) REQUIRE(cur.count(beh));
    prev = cur;
  }
  // first witness is the least id
  auto all = behaviors_on(st, U, 4096);
  for (const auto& [beh, id] : all) {
    for (std::uint64_t c = 0; c < id.index; ++c) {
      Behavior other;
      for (const auto& x : U) other.push_back(eval_ideal(st, IdealId{c}, x));
      REQUIRE(other != beh);
    }
  }
}

TEST_CASE("stump class meets the Sauer bound with equality") {
  auto st = stump_presentation();
  const auto en = RationalEnumeration::diagonal();
  std::mt19937_64 g(17);
  for (std::size_t n = 1; n <= 12; ++n) {
    std::vector<long long> js;
    std::set<long long> used;
    while (js.size() < n) {
      long long j = static_cast<long long>(g() % 65) - 32;
      if (used.insert(j).second) js.push_back(j);
    }
    std::vector<PointDescription<Rational>> U;
    for (auto j : js) U.push_back(g16(j));
    const auto count = behaviors_on(st, U, 4096).size();
    REQUIRE(count == brute_stump_behaviors(js, en));
    REQUIRE(count == sauer_bound(1, n));
  }
}

TEST_CASE("shattering and VC lower bounds") {
  auto st = stump_presentation();
  CHECK_FALSE(shatters(st, {g16(1), g16(2)}, 4096));
  CHECK(shatters(st, {g16(1)}, 4096));
  auto ap = apply_presentation();
  std::vector<PointDescription<std::uint64_t>> pool;
  for (std::uint64_t n = 0; n < 3; ++n) pool.push_back(PointDescription<std::uint64_t>::constant(n));
  CHECK(vc_lower_bound(ap, pool, 3, 64).lower_bound == 3);

  auto hc = halting_presentation(64, 1000);
  std::vector<PointDescription<std::uint64_t>> hpool;
  for (std::uint64_t n = 0; n < 64; ++n) hpool.push_back(PointDescription<std::uint64_t>::constant(n));
  auto r = vc_lower_bound(hc.presentation, hpool, 2, 1000);
  CHECK(r.lower_bound == 1);
  CHECK(r.refuted_next == 64 * 63 / 2);

  // a non-shattered pair stays unshattered inside every superset
  auto table = evaluation_table(st, generic_pool(0, 4), 4096);
  CHECK(vc_from_table(table, 4, 4).lower_bound == 1);
}

TEST_CASE("sauer bound") {
  CHECK(sauer_bound(1, 5) == 6);
  CHECK(sauer_bound(0, 7) == 1);
  CHECK(sauer_bound(9, 6) == 64);
  CHECK(sauer_bound(2, 10) == 56);
}
