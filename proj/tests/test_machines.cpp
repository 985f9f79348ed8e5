// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "catch_amalgamated.hpp"
#include "cpac/machines.hpp"

using namespace cpac;

namespace {

std::uint64_t encode(std::vector<Instruction> code) { return Program{std::move(code)}.encode(); }

const std::uint64_t kHalt = encode({Instruction::halt()});
const std::uint64_t kLoop = encode({Instruction::decjz(0, 0)});
// reads z(0); halts iff it is 0
const Program kReadZero{{Instruction::ord(0), Instruction::decjz(0, 3), Instruction::jmp(2)}};

}  // namespace

TEST_CASE("instruction and program codes are total and invertible") {
  for (std::uint64_t c = 0; c < 5000; ++c) REQUIRE(Instruction::decode(c).encode() == c);
  for (std::uint64_t n = 0; n < 5000; ++n) REQUIRE(Program::decode(n).encode() == n);
  CHECK(kHalt == 1);
  CHECK(Program::decode(2).code == std::vector<Instruction>{Instruction::inc(0)});
  CHECK(kLoop == 8);
  CHECK(disassemble(kReadZero) == "0: ord r0\n1: decjz r0, 3\n2: jmp 2\n");
}

TEST_CASE("run examples") {
  CHECK(run(kHalt, 0, 10) == ExecOutcome{Halted{1, 0}});
  CHECK(run(kLoop, 0, 1000) == ExecOutcome{StillRunning{1000}});
  CHECK(run(0, 0, 1) == ExecOutcome{Halted{1, 0}});
  // inc r0 then fall off the end
  CHECK(run(2, 5, 10) == ExecOutcome{Halted{2, 6}});
  // r0 := 3, then count it down into r1
  Program copy{{Instruction::inc(0), Instruction::inc(0), Instruction::inc(0), Instruction::decjz(0, 6),
                Instruction::inc(1), Instruction::jmp(3)}};
  auto out = run(copy, 0, 100);
  REQUIRE(is_halted(out));
  CHECK(std::get<Halted>(out).steps == 3 + 3 * 3 + 1 + 1);
}

TEST_CASE("run is monotone in the budget") {
  std::mt19937_64 g(5);
  for (int t = 0; t < 1000; ++t) {
    std::uint64_t p = g() % 100000;
    std::uint64_t b = 1 + g() % 200;
    std::uint64_t b2 = b + g() % 200;
    std::uint64_t x = g() % 4;
    auto o = run(p, x, b);
    if (auto h = std::get_if<Halted>(&o)) {
      REQUIRE(h->steps <= b);
      REQUIRE(run(p, x, b2) == o);
    }
  }
}

TEST_CASE("dovetailed enumeration matches exhaustive simulation") {
  const std::uint64_t p_max = 300, s_max = 2000;
  auto e = enumerate_halting(p_max, s_max);
  std::vector<HaltingEntry> brute;
  for (std::uint64_t p = 0; p <= p_max; ++p) {
    if (auto k = halt_steps(run(p, 0, s_max))) brute.push_back({p, *k});
  }
  std::sort(brute.begin(), brute.end(), [](const HaltingEntry& a, const HaltingEntry& b) {
    return std::pair{a.halt_steps, a.program} < std::pair{b.halt_steps, b.program};
  });
  CHECK(e.entries == brute);
  CHECK(e.contains(kHalt));
  CHECK(*e.steps_of(kHalt) == 1);
  CHECK_FALSE(e.contains(kLoop));
}

TEST_CASE("halt_time_equiv") {
  CHECK(halt_time_equiv(kHalt, kHalt, 100) == 1);
  CHECK(halt_time_equiv(kHalt, kLoop, 100) == 0);
  CHECK_THROWS_AS(halt_time_equiv(kLoop, kHalt, 100), IndexNotHalting);
  const std::uint64_t budget = 500;
  for (std::uint64_t a = 0; a < 64; ++a) {
    auto ta = halt_steps(run(a, 0, budget));
    for (std::uint64_t b = 0; b < 64; ++b) {
      auto tb = halt_steps(run(b, 0, budget));
      if (!ta) {
        REQUIRE_THROWS_AS(halt_time_equiv(a, b, budget), IndexNotHalting);
        continue;
      }
      const std::uint8_t want = (tb && *ta == *tb) ? 1 : 0;
      REQUIRE(halt_time_equiv(a, b, budget) == want);
      if (tb) REQUIRE(halt_time_equiv(b, a, budget) == want);
    }
  }
}

TEST_CASE("oracle runs") {
  CHECK(is_halted(run_oracle(kReadZero, OracleTape{}, 0, 50)));
  for (std::uint64_t b : {10, 100, 1000}) {
    CHECK_FALSE(is_halted(run_oracle(kReadZero, OracleTape{{0, 1}}, 0, b)));
  }
  std::mt19937_64 g(8);
  for (int t = 0; t < 1000; ++t) {
    std::uint64_t p = g() % 100;  // codes below 128 contain no oracle reads
    REQUIRE(run_oracle(p, OracleTape{{g() % 4, 1 + g() % 3}}, 0, 300) == run(p, 0, 300));
  }
}

TEST_CASE("oracle runs depend only on the cells they read") {
  std::mt19937_64 g(21);
  Program addr{{Instruction::inc(1), Instruction::inc(1), Instruction::ord(1), Instruction::decjz(1, 5),
                Instruction::jmp(4)}};
  for (int t = 0; t < 300; ++t) {
    OracleTape z;
    for (int c = 0; c < 4; ++c) z.set(g() % 6, g() % 3);
    const Program& p = (t % 2 == 0) ? kReadZero : addr;
    auto [out, reads] = run_oracle_traced(p, z, 0, 200);
    OracleTape z2 = z;
    for (std::uint64_t cell = 0; cell < 8; ++cell) {
      if (!reads.count(cell)) z2.set(cell, 1 + g() % 5);
    }
    REQUIRE(run_oracle(p, z2, 0, 200) == out);
  }
}

TEST_CASE("jump bits") {
  CHECK(jump_bit(OracleTape{{3, 3}}, kHalt, 10) == 1);
  CHECK(jump_bit(OracleTape{{3, 3}}, kLoop, 10) == 0);
  CHECK(jump_bit(OracleTape{}, kReadZero.encode(), 10) == 1);
  CHECK(jump_bit(OracleTape{{0, 2}}, kReadZero.encode(), 10) == 0);
  auto e = enumerate_halting(64, 1000);
  auto table = e.table(16);
  for (std::uint64_t p = 0; p < 16; ++p) CHECK(jump_bit(OracleTape{{1, 2}}, p, 1000) == table[p]);
}

TEST_CASE("oracle tapes") {
  OracleTape z{{2, 5}, {0, 0}};
  CHECK(z.at(2) == 5);
  CHECK(z.at(0) == 0);
  CHECK(z.support().size() == 1);
  CHECK(z.as_sequence() == FiniteSequence{0, 0, 5});
  CHECK(OracleTape::from_sequence({0, 0, 5}) == z);
}
