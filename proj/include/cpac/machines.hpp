// SPDX-License-Identifier: Apache-2.0
//
// A small register machine: four registers, five opcodes, step-bounded runs,
// dovetailed halting enumeration and finite-support oracle tapes. Every halting
// fact derived here is relative to an explicit step budget.
//
// Semantics. The input is placed in r0, the other registers start at 0, the
// output is r0 at halt. Each executed instruction is one step; moving the
// program counter past the last instruction is an implicit halt that also
// costs one step.
//
//   halt          stop
//   inc r         r += 1
//   decjz r, t    if r == 0 jump to t, else r -= 1
//   jmp t         jump to t
//   ord r         r := z(r), reading the oracle tape at address r
//
// Instruction codes (a bijection with N):
//
//   0       halt             7..10   ord r0..r3
//   1       inc r0           11..13  decjz r1..r3, 0
//   2       jmp 0            14 + 5(t-1) + k, t >= 1:
//   3       decjz r0, 0          k = 0: jmp t; k = 1..4: decjz r(k-1), t
//   4..6    inc r1..r3
//
// A program is a list of instruction codes under the shared list code.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cpac/encoding.hpp"
#include "cpac/error.hpp"

namespace cpac {

inline constexpr std::size_t kRegisterCount = 4;

enum class Opcode : std::uint8_t { halt, inc, decjz, jmp, ord };

struct Instruction {
  Opcode op = Opcode::halt;
  std::uint8_t reg = 0;
  std::uint64_t target = 0;

  friend bool operator==(const Instruction&, const Instruction&) = default;

  static Instruction halt() { return {Opcode::halt, 0, 0}; }
  static Instruction inc(std::uint8_t r) { return {Opcode::inc, r, 0}; }
  static Instruction decjz(std::uint8_t r, std::uint64_t t) { return {Opcode::decjz, r, t}; }
  static Instruction jmp(std::uint64_t t) { return {Opcode::jmp, 0, t}; }
  static Instruction ord(std::uint8_t r) { return {Opcode::ord, r, 0}; }

  std::uint64_t encode() const {
    if (reg >= kRegisterCount) throw std::invalid_argument("register out of range");
    switch (op) {
      case Opcode::halt: return 0;
      case Opcode::inc: return reg == 0 ? 1 : 3 + reg;
      case Opcode::ord: return 7 + reg;
      case Opcode::jmp:
        if (target == 0) return 2;
        return 14 + 5 * (target - 1);
      case Opcode::decjz:
        if (target == 0) return reg == 0 ? 3 : 10 + reg;
        return 14 + 5 * (target - 1) + 1 + reg;
    }
    return 0;
  }

  static Instruction decode(std::uint64_t c) {
    if (c == 0) return halt();
    if (c == 1) return inc(0);
    if (c == 2) return jmp(0);
    if (c == 3) return decjz(0, 0);
    if (c <= 6) return inc(static_cast<std::uint8_t>(c - 3));
    if (c <= 10) return ord(static_cast<std::uint8_t>(c - 7));
    if (c <= 13) return decjz(static_cast<std::uint8_t>(c - 10), 0);
    const std::uint64_t u = c - 14;
    const std::uint64_t t = u / 5 + 1;
    const std::uint64_t k = u % 5;
    if (k == 0) return jmp(t);
    return decjz(static_cast<std::uint8_t>(k - 1), t);
  }

  std::string text() const {
    const std::string r = "r" + std::to_string(reg);
    switch (op) {
      case Opcode::halt: return "halt";
      case Opcode::inc: return "inc " + r;
      case Opcode::decjz: return "decjz " + r + ", " + std::to_string(target);
      case Opcode::jmp: return "jmp " + std::to_string(target);
      case Opcode::ord: return "ord " + r;
    }
    return "?";
  }
};

struct Program {
  std::vector<Instruction> code;

  friend bool operator==(const Program&, const Program&) = default;

  static Program decode(std::uint64_t n) {
    Program p;
    for (auto c : list_decode(n)) p.code.push_back(Instruction::decode(c));
    return p;
  }
  std::uint64_t encode() const {
    std::vector<std::uint64_t> codes;
    codes.reserve(code.size());
    for (const auto& ins : code) codes.push_back(ins.encode());
    return list_code(codes);
  }
  bool uses_oracle() const {
    return std::any_of(code.begin(), code.end(), [](const Instruction& i) { return i.op == Opcode::ord; });
  }
};

/// One instruction per line, prefixed with its address.
inline std::string disassemble(const Program& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.code.size(); ++i) os << i << ": " << p.code[i].text() << '\n';
  if (p.code.empty()) os << "(empty program: halts immediately)\n";
  return os.str();
}

struct Halted {
  std::uint64_t steps;
  std::uint64_t output;
  friend bool operator==(const Halted&, const Halted&) = default;
};
struct StillRunning {
  std::uint64_t budget;
  friend bool operator==(const StillRunning&, const StillRunning&) = default;
};
using ExecOutcome = std::variant<Halted, StillRunning>;

inline bool is_halted(const ExecOutcome& o) { return std::holds_alternative<Halted>(o); }
inline std::optional<std::uint64_t> halt_steps(const ExecOutcome& o) {
  if (auto* h = std::get_if<Halted>(&o)) return h->steps;
  return std::nullopt;
}

/// Oracle with finitely many nonzero cells; every other cell reads 0.
class OracleTape {
 public:
  OracleTape() = default;
  OracleTape(std::initializer_list<std::pair<const std::uint64_t, std::uint64_t>> cells) {
    for (const auto& [k, v] : cells) set(k, v);
  }

  void set(std::uint64_t cell, std::uint64_t value) {
    if (value == 0) {
      cells_.erase(cell);
    } else {
      cells_[cell] = value;
    }
  }
  std::uint64_t at(std::uint64_t cell) const {
    auto it = cells_.find(cell);
    return it == cells_.end() ? 0 : it->second;
  }
  const std::map<std::uint64_t, std::uint64_t>& support() const { return cells_; }

  /// The tape as a finitely supported sequence (a Baire ideal point).
  FiniteSequence as_sequence() const {
    if (cells_.empty()) return {};
    FiniteSequence s(cells_.rbegin()->first + 1, 0);
    for (const auto& [k, v] : cells_) s[k] = v;
    return s;
  }
  static OracleTape from_sequence(const FiniteSequence& s) {
    OracleTape z;
    for (std::size_t k = 0; k < s.size(); ++k) z.set(k, s[k]);
    return z;
  }

  friend bool operator==(const OracleTape&, const OracleTape&) = default;

 private:
  std::map<std::uint64_t, std::uint64_t> cells_;
};

/// Oracle access that may decline a cell (its value is not yet known).
using OracleView = std::function<std::optional<std::uint64_t>(std::uint64_t)>;

/// Single-stepping interpreter.
class Machine {
 public:
  enum class State : std::uint8_t { running, halted, blocked };

  Machine(Program program, std::uint64_t input) : program_(std::move(program)) { regs_[0] = input; }

  State state() const { return state_; }
  std::uint64_t steps() const { return steps_; }
  std::uint64_t output() const { return regs_[0]; }
  /// Cell whose read was declined, when blocked.
  std::uint64_t blocked_on() const { return blocked_on_; }
  const std::set<std::uint64_t>& cells_read() const { return reads_; }

  /// Executes one instruction. A declined oracle read leaves the machine
  /// blocked without consuming a step.
  State step(const OracleView& oracle) {
    if (state_ != State::running) return state_;
    if (pc_ >= program_.code.size()) {
      ++steps_;
      state_ = State::halted;
      return state_;
    }
    const Instruction& ins = program_.code[pc_];
    switch (ins.op) {
      case Opcode::halt:
        ++steps_;
        state_ = State::halted;
        return state_;
      case Opcode::inc:
        ++regs_[ins.reg];
        ++pc_;
        break;
      case Opcode::decjz:
        if (regs_[ins.reg] == 0) {
          pc_ = ins.target;
        } else {
          --regs_[ins.reg];
          ++pc_;
        }
        break;
      case Opcode::jmp:
        pc_ = ins.target;
        break;
      case Opcode::ord: {
        const std::uint64_t cell = regs_[ins.reg];
        std::optional<std::uint64_t> v = oracle ? oracle(cell) : std::optional<std::uint64_t>(0);
        if (!v) {
          blocked_on_ = cell;
          state_ = State::blocked;
          return state_;
        }
        reads_.insert(cell);
        regs_[ins.reg] = *v;
        ++pc_;
        break;
      }
    }
    ++steps_;
    return state_;
  }

 private:
  Program program_;
  std::array<std::uint64_t, kRegisterCount> regs_{};
  std::uint64_t pc_ = 0;
  std::uint64_t steps_ = 0;
  State state_ = State::running;
  std::uint64_t blocked_on_ = 0;
  std::set<std::uint64_t> reads_;
};

inline OracleView tape_view(const OracleTape& z) {
  return [&z](std::uint64_t cell) { return std::optional<std::uint64_t>(z.at(cell)); };
}

/// Outcome of a run against a partial oracle.
struct Blocked {
  std::uint64_t cell;
};
using PartialOutcome = std::variant<Halted, StillRunning, Blocked>;

inline PartialOutcome run_partial(const Program& p, const OracleView& oracle, std::uint64_t input,
                                  std::uint64_t budget) {
  Machine m(p, input);
  while (m.steps() < budget) {
    switch (m.step(oracle)) {
      case Machine::State::halted: return Halted{m.steps(), m.output()};
      case Machine::State::blocked: return Blocked{m.blocked_on()};
      case Machine::State::running: break;
    }
  }
  return StillRunning{budget};
}

inline ExecOutcome run_oracle(const Program& p, const OracleTape& z, std::uint64_t input, std::uint64_t budget) {
  if (budget < 1) throw std::invalid_argument("run needs budget >= 1");
  Machine m(p, input);
  const OracleView view = tape_view(z);
  while (m.steps() < budget) {
    if (m.step(view) == Machine::State::halted) return Halted{m.steps(), m.output()};
  }
  return StillRunning{budget};
}

inline ExecOutcome run_oracle(std::uint64_t p, const OracleTape& z, std::uint64_t input, std::uint64_t budget) {
  return run_oracle(Program::decode(p), z, input, budget);
}

/// Oracle-free run; oracle reads see the all-zero tape.
inline ExecOutcome run(const Program& p, std::uint64_t input, std::uint64_t budget) {
  return run_oracle(p, OracleTape{}, input, budget);
}
inline ExecOutcome run(std::uint64_t p, std::uint64_t input, std::uint64_t budget) {
  return run(Program::decode(p), input, budget);
}

/// Run plus the set of oracle cells consulted.
inline std::pair<ExecOutcome, std::set<std::uint64_t>> run_oracle_traced(const Program& p, const OracleTape& z,
                                                                         std::uint64_t input, std::uint64_t budget) {
  Machine m(p, input);
  const OracleView view = tape_view(z);
  while (m.steps() < budget) {
    if (m.step(view) == Machine::State::halted) return {Halted{m.steps(), m.output()}, m.cells_read()};
  }
  return {StillRunning{budget}, m.cells_read()};
}

struct HaltingEntry {
  std::uint64_t program;
  std::uint64_t halt_steps;
  friend bool operator==(const HaltingEntry&, const HaltingEntry&) = default;
};

/// Programs p <= p_max halting on input 0 within s_max steps, in order of
/// discovery by dovetailing (halt time, then program index).
struct HaltingEnumeration {
  std::vector<HaltingEntry> entries;
  std::uint64_t p_max = 0;
  std::uint64_t s_max = 0;

  std::optional<std::uint64_t> steps_of(std::uint64_t program) const {
    for (const auto& e : entries) {
      if (e.program == program) return e.halt_steps;
    }
    return std::nullopt;
  }
  bool contains(std::uint64_t program) const { return steps_of(program).has_value(); }

  /// Budgeted halting table restricted to [n].
  std::vector<std::uint8_t> table(std::uint64_t n) const {
    std::vector<std::uint8_t> bits(n, 0);
    for (const auto& e : entries) {
      if (e.program < n) bits[e.program] = 1;
    }
    return bits;
  }
  std::vector<std::uint64_t> programs() const {
    std::vector<std::uint64_t> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.program);
    return out;
  }
};

/// Dovetails every program p <= p_max on input 0 one step per round.
inline HaltingEnumeration enumerate_halting(std::uint64_t p_max, std::uint64_t s_max) {
  if (p_max < 1 || s_max < 1) throw std::invalid_argument("enumerate_halting needs budgets >= 1");
  std::vector<Machine> live;
  std::vector<std::uint64_t> ids;
  for (std::uint64_t p = 0; p <= p_max; ++p) {
    live.emplace_back(Program::decode(p), 0);
    ids.push_back(p);
  }
  HaltingEnumeration out{{}, p_max, s_max};
  const OracleView zero = [](std::uint64_t) { return std::optional<std::uint64_t>(0); };
  for (std::uint64_t round = 1; round <= s_max && !live.empty(); ++round) {
    std::vector<Machine> next;
    std::vector<std::uint64_t> next_ids;
    for (std::size_t k = 0; k < live.size(); ++k) {
      if (live[k].step(zero) == Machine::State::halted) {
        out.entries.push_back({ids[k], round});
      } else {
        next.push_back(std::move(live[k]));
        next_ids.push_back(ids[k]);
      }
    }
    live = std::move(next);
    ids = std::move(next_ids);
  }
  return out;
}

/// 1 iff program n1 halts on input 0 in exactly the number of steps program
/// n0 takes. n0 must halt within the budget.
inline std::uint8_t halt_time_equiv(std::uint64_t n0, std::uint64_t n1, std::uint64_t budget) {
  auto first = run(n0, 0, budget);
  auto k = halt_steps(first);
  if (!k) throw IndexNotHalting("program " + std::to_string(n0) + " does not halt within " + std::to_string(budget));
  auto second = run(n1, 0, *k);
  auto k1 = halt_steps(second);
  return (k1 && *k1 == *k) ? 1 : 0;
}

/// Budgeted stand-in for z'(e): 1 iff {e}^z(0) halts within the budget.
inline std::uint8_t jump_bit(const OracleTape& z, std::uint64_t e, std::uint64_t budget) {
  if (budget < 1) throw std::invalid_argument("jump_bit needs budget >= 1");
  return is_halted(run_oracle(e, z, 0, budget)) ? 1 : 0;
}

}  // namespace cpac
