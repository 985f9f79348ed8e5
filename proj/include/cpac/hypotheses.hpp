// SPDX-License-Identifier: Apache-2.0
//
// Presentations h : I x X -> {0, 1} as monotone ball-query evaluators, the
// concrete classes used by the learners, and brute-force behavior, shattering
// and VC machinery.
//
// An evaluator receives the precision-k approximants of an index point and a
// feature point (each within 2^-k of its point) and answers 0, 1 or unknown.
// Once it answers at precision k it must give the same answer at every
// precision above k.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cpac/error.hpp"
#include "cpac/exact.hpp"
#include "cpac/machines.hpp"
#include "cpac/spaces.hpp"

namespace cpac {

enum class Resolution : std::uint8_t { zero, one, unknown };

inline Resolution resolved(bool bit) { return bit ? Resolution::one : Resolution::zero; }

template <class I, class X>
struct Presentation {
  using IndexIdeal = I;
  using FeatureIdeal = X;
  using Evaluator = std::function<Resolution(const I&, const X&, unsigned)>;

  std::string label;
  MetricSpace<I> index_space;
  MetricSpace<X> sample_space;
  Evaluator evaluate;
  /// True when evaluation depends on a step or program budget.
  bool budget_relative = false;

  PointDescription<I> index_point(IdealId id) const { return PointDescription<I>::constant(index_space.ideal(id)); }
};

/// h(i, x), refining both descriptions together until the evaluator answers.
template <class I, class X>
std::uint8_t eval(const Presentation<I, X>& h, const PointDescription<I>& i, const PointDescription<X>& x,
                  unsigned cap = kDefaultCap) {
  for (unsigned k = 0; k <= cap; ++k) {
    switch (h.evaluate(i(k), x(k), k)) {
      case Resolution::zero: return 0;
      case Resolution::one: return 1;
      case Resolution::unknown: break;
    }
  }
  throw PrecisionExhausted(h.label + ": evaluation unresolved at cap " + std::to_string(cap));
}

/// Evaluation with an ideal index point (a constant description).
template <class I, class X>
std::uint8_t eval_ideal(const Presentation<I, X>& h, IdealId c, const PointDescription<X>& x,
                        unsigned cap = kDefaultCap) {
  return eval(h, h.index_point(c), x, cap);
}

// ---------------------------------------------------------------------------
// Decision stumps: h(c, x) = 1 iff x > c.

using StumpPresentation = Presentation<Rational, Rational>;

inline StumpPresentation stump_presentation(RationalEnumeration enumeration = RationalEnumeration::diagonal()) {
  auto evaluate = [](const Rational& c, const Rational& x, unsigned k) {
    // x - c against the combined radius 2 * 2^-k, without normalizing
    const Rational d = x - c;
    const BigInt lhs = d.numerator() << k;
    const BigInt two_den = d.denominator() * 2;
    if (lhs > two_den) return Resolution::one;
    if (lhs < -two_den) return Resolution::zero;
    return Resolution::unknown;
  };
  return StumpPresentation{"stump", real_line(std::move(enumeration)), real_line(),
                           evaluate, false};
}

// ---------------------------------------------------------------------------
// h(s, n) = s(n) on Cantor space.

using ApplyPresentation = Presentation<FiniteSequence, std::uint64_t>;

inline ApplyPresentation apply_presentation() {
  auto evaluate = [](const FiniteSequence& s, const std::uint64_t& n, unsigned k) {
    // Within 2^-k in the ultrametric pins coordinates below k; the discrete
    // feature is pinned once 2^-k < 1.
    if (k < 1 || n >= k) return Resolution::unknown;
    return resolved(n < s.size() && s[n] != 0);
  };
  return ApplyPresentation{"apply", cantor_space(), discrete_naturals(), evaluate, false};
}

/// The all-ones / all-zeros style constant Cantor points and friends.
inline PointDescription<FiniteSequence> cantor_point(std::function<std::uint64_t(std::size_t)> bits) {
  return sequence_point(std::move(bits));
}

// ---------------------------------------------------------------------------
// Halting-time equivalence over programs halting within the budget.

using HaltingPresentation = Presentation<std::uint64_t, std::uint64_t>;

struct HaltingClass {
  HaltingEnumeration halting;
  HaltingPresentation presentation;
};

inline HaltingClass halting_presentation(std::uint64_t p_max, std::uint64_t s_max) {
  HaltingEnumeration e = enumerate_halting(p_max, s_max);
  auto evaluate = [s_max](const std::uint64_t& n0, const std::uint64_t& n1, unsigned k) {
    if (k < 1) return Resolution::unknown;
    return resolved(halt_time_equiv(n0, n1, s_max) == 1);
  };
  HaltingPresentation h{"halting-time", discrete_space(e.programs(), "halting programs"),
                        discrete_naturals(p_max + 1), evaluate, true};
  return HaltingClass{std::move(e), std::move(h)};
}

// ---------------------------------------------------------------------------
// Halting-time equivalence of (program, oracle) pairs.

/// Index ideal: program e with finite-support oracle z, halting on 0 in `steps`.
struct OracleIdeal {
  std::uint64_t program = 0;
  FiniteSequence oracle;
  std::uint64_t steps = 0;
  friend bool operator==(const OracleIdeal&, const OracleIdeal&) = default;
};

/// Feature ideal: (program, oracle prefix).
using OracleFeature = std::pair<std::uint64_t, FiniteSequence>;

using OracleHaltingPresentation = Presentation<OracleIdeal, OracleFeature>;

/// Every tape with support in [0, cells) and values below `values`.
inline std::vector<FiniteSequence> oracle_family(std::uint64_t cells, std::uint64_t values) {
  std::vector<FiniteSequence> out;
  std::uint64_t total = 1;
  for (std::uint64_t k = 0; k < cells; ++k) total *= values;
  for (std::uint64_t code = 0; code < total; ++code) {
    FiniteSequence s(cells);
    std::uint64_t c = code;
    for (std::uint64_t k = 0; k < cells; ++k) {
      s[k] = c % values;
      c /= values;
    }
    out.push_back(strip_trailing_zeros(std::move(s)));
  }
  return out;
}

struct OracleHaltingClass {
  std::vector<OracleIdeal> ideals;
  std::uint64_t s_max = 0;
  OracleHaltingPresentation presentation;
};

/// Ideal points are the (e, z) with e in `programs` and z in `family` that
/// halt on input 0 within s_max steps, ordered by halt time, then program,
/// then family position.
inline OracleHaltingClass oracle_halting_presentation(const std::vector<std::uint64_t>& programs,
                                                      const std::vector<FiniteSequence>& family,
                                                      std::uint64_t s_max) {
  if (programs.empty() || s_max < 1) throw std::invalid_argument("oracle halting class needs programs and s_max >= 1");
  struct Found {
    OracleIdeal ideal;
    std::size_t family_pos;
  };
  std::vector<Found> found;
  for (auto e : programs) {
    const Program p = Program::decode(e);
    for (std::size_t f = 0; f < family.size(); ++f) {
      if (!p.uses_oracle() && f > 0) break;  // the oracle is irrelevant
      auto out = run_oracle(p, OracleTape::from_sequence(family[f]), 0, s_max);
      if (auto t = halt_steps(out)) found.push_back({OracleIdeal{e, family[f], *t}, f});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    return std::tie(a.ideal.steps, a.ideal.program, a.family_pos) <
           std::tie(b.ideal.steps, b.ideal.program, b.family_pos);
  });
  auto ideals = std::make_shared<std::vector<OracleIdeal>>();
  for (auto& f : found) ideals->push_back(std::move(f.ideal));

  auto feature_space = product_space(discrete_naturals(), baire_space());
  MetricSpace<OracleIdeal> index_space(
      "halting (program, oracle)", static_cast<std::uint64_t>(ideals->size()),
      [ideals](IdealId id) { return (*ideals)[id.index]; },
      [feature_space](const OracleIdeal& a, const OracleIdeal& b) {
        return feature_space.distance({a.program, a.oracle}, {b.program, b.oracle});
      },
      SpaceTraits{std::nullopt, true});

  auto evaluate = [](const OracleIdeal& w, const OracleFeature& x, unsigned k) {
    if (k < 1) return Resolution::unknown;
    if (w.program != x.first) return Resolution::zero;
    // Cells below k are pinned by the approximant; reading any other cell
    // needs more precision.
    const FiniteSequence& prefix = x.second;
    OracleView view = [&prefix, k](std::uint64_t cell) -> std::optional<std::uint64_t> {
      if (cell >= k) return std::nullopt;
      return cell < prefix.size() ? prefix[cell] : 0;
    };
    auto out = run_partial(Program::decode(x.first), view, 0, w.steps);
    if (std::holds_alternative<Blocked>(out)) return Resolution::unknown;
    if (auto* h = std::get_if<Halted>(&out)) return resolved(h->steps == w.steps);
    return Resolution::zero;
  };
  OracleHaltingPresentation h{"oracle-halting-time", std::move(index_space), feature_space, evaluate, true};
  std::vector<OracleIdeal> copy = *ideals;
  return OracleHaltingClass{std::move(copy), s_max, std::move(h)};
}

/// Description of the feature (e, z) for a finite-support tape z.
inline PointDescription<OracleFeature> oracle_feature_point(std::uint64_t e, const OracleTape& z) {
  FiniteSequence s = z.as_sequence();
  return PointDescription<OracleFeature>([e, s](unsigned i) {
    FiniteSequence prefix(s.begin(), s.begin() + std::min<std::size_t>(s.size(), static_cast<std::size_t>(i) + 1));
    return OracleFeature{e, strip_trailing_zeros(std::move(prefix))};
  });
}

// ---------------------------------------------------------------------------
// Behaviors, shattering, VC lower bounds.

using Behavior = std::vector<std::uint8_t>;

/// Distinct label vectors on U over ideal ids below the budget, each with its
/// first (least-id) witness.
template <class I, class X>
std::map<Behavior, IdealId> behaviors_on(const Presentation<I, X>& h, const std::vector<PointDescription<X>>& U,
                                         std::uint64_t ideal_budget, unsigned cap = kDefaultCap) {
  if (U.empty()) throw std::invalid_argument("behaviors_on needs a nonempty feature list");
  std::map<Behavior, IdealId> out;
  const std::uint64_t limit = h.index_space.scan_limit(ideal_budget);
  for (std::uint64_t c = 0; c < limit; ++c) {
    const auto ip = h.index_point(IdealId{c});
    Behavior b;
    b.reserve(U.size());
    for (const auto& x : U) b.push_back(eval(h, ip, x, cap));
    out.emplace(std::move(b), IdealId{c});
  }
  return out;
}

template <class I, class X>
bool shatters(const Presentation<I, X>& h, const std::vector<PointDescription<X>>& C, std::uint64_t ideal_budget,
              unsigned cap = kDefaultCap) {
  if (C.size() >= 63) throw std::invalid_argument("shatters: set too large");
  return behaviors_on(h, C, ideal_budget, cap).size() == (std::uint64_t{1} << C.size());
}

/// h(c, x) for every scanned ideal c and every pool feature x.
template <class I, class X>
std::vector<std::vector<std::uint8_t>> evaluation_table(const Presentation<I, X>& h,
                                                        const std::vector<PointDescription<X>>& pool,
                                                        std::uint64_t ideal_budget, unsigned cap = kDefaultCap) {
  const std::uint64_t limit = h.index_space.scan_limit(ideal_budget);
  std::vector<std::vector<std::uint8_t>> table(limit, std::vector<std::uint8_t>(pool.size()));
  for (std::uint64_t c = 0; c < limit; ++c) {
    const auto ip = h.index_point(IdealId{c});
    for (std::size_t u = 0; u < pool.size(); ++u) table[c][u] = eval(h, ip, pool[u], cap);
  }
  return table;
}

struct VcResult {
  std::uint64_t lower_bound = 0;
  /// A shattered subset of that size (pool positions).
  std::vector<std::size_t> witness;
  /// Number of subsets of size lower_bound + 1 checked and found unshattered.
  std::uint64_t refuted_next = 0;
};

namespace detail {

template <class F>
bool for_each_subset(std::size_t n, std::size_t d, F&& f) {
  std::vector<std::size_t> idx(d);
  for (std::size_t k = 0; k < d; ++k) idx[k] = k;
  if (d > n) return false;
  while (true) {
    if (f(idx)) return true;
    std::size_t k = d;
    while (k > 0 && idx[k - 1] == n - d + k - 1) --k;
    if (k == 0) return false;
    ++idx[k - 1];
    for (std::size_t t = k; t < d; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace detail

/// Largest d <= d_max such that some d-subset of the pool is shattered by the
/// ideals below the budget. Exhaustive over subsets; budget-relative.
inline VcResult vc_from_table(const std::vector<std::vector<std::uint8_t>>& table, std::size_t pool_size,
                              std::uint64_t d_max) {
  VcResult r;
  for (std::uint64_t d = 1; d <= d_max && d <= pool_size && d < 20; ++d) {
    std::vector<std::size_t> hit;
    std::uint64_t checked = 0;
    const std::uint64_t full = std::uint64_t{1} << d;
    bool any = detail::for_each_subset(pool_size, d, [&](const std::vector<std::size_t>& sub) {
      std::vector<bool> seen(full, false);
      std::uint64_t distinct = 0;
      for (const auto& row : table) {
        std::uint64_t mask = 0;
        for (std::size_t t = 0; t < sub.size(); ++t) mask |= std::uint64_t{row[sub[t]]} << t;
        if (!seen[mask]) {
          seen[mask] = true;
          if (++distinct == full) break;
        }
      }
      ++checked;
      if (distinct == full) {
        hit = sub;
        return true;
      }
      return false;
    });
    if (!any) {
      r.refuted_next = checked;
      break;
    }
    r.lower_bound = d;
    r.witness = hit;
  }
  return r;
}

template <class I, class X>
VcResult vc_lower_bound(const Presentation<I, X>& h, const std::vector<PointDescription<X>>& pool,
                        std::uint64_t d_max, std::uint64_t ideal_budget, unsigned cap = kDefaultCap) {
  return vc_from_table(evaluation_table(h, pool, ideal_budget, cap), pool.size(), d_max);
}

/// sum_{i <= d} C(m, i).
inline std::uint64_t sauer_bound(std::uint64_t d, std::uint64_t m) {
  BigInt total = 0;
  BigInt binom = 1;
  for (std::uint64_t i = 0; i <= std::min(d, m); ++i) {
    if (i > 0) binom = binom * (m - i + 1) / i;
    total += binom;
  }
  if (total > BigInt(UINT64_MAX)) throw std::overflow_error("sauer bound overflow");
  return static_cast<std::uint64_t>(total);
}

}  // namespace cpac
