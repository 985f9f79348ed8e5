// SPDX-License-Identifier: Apache-2.0
//
// Proper learners over presentations: realizable ERM by ideal search, the
// staged anytime ERM whose diagonal converges to an ERM output, behavior-count
// ERM for classes whose restriction sizes are known, the decision-stump
// learner, its coarsened variant, and the learner induced by a proper learner.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpac/error.hpp"
#include "cpac/exact.hpp"
#include "cpac/hypotheses.hpp"
#include "cpac/machines.hpp"
#include "cpac/spaces.hpp"

namespace cpac {

template <class X>
struct LabeledExample {
  PointDescription<X> feature;
  std::uint8_t label = 0;

  LabeledExample() = default;
  LabeledExample(PointDescription<X> f, std::uint8_t y) : feature(std::move(f)), label(y) {
    if (y > 1) throw std::invalid_argument("label must be 0 or 1");
  }
};

template <class X>
using Sample = std::vector<LabeledExample<X>>;

/// A feature point as a stream of rationals, for comparison routines.
inline RealStream as_real(const PointDescription<Rational>& p) {
  return RealStream([p](unsigned i) { return p(i); });
}

inline PointDescription<Rational> generic_point(const Rational& q, unsigned scale_exp) {
  return real_point(generic_real(q, scale_exp));
}

/// Number of examples h(c, .) gets wrong, or nullopt once it exceeds `stop_above`.
template <class I, class X>
std::optional<std::uint64_t> mistakes(const Presentation<I, X>& h, IdealId c, const Sample<X>& S, unsigned cap,
                                      std::uint64_t stop_above = UINT64_MAX) {
  const auto ip = h.index_point(c);
  std::uint64_t wrong = 0;
  for (const auto& ex : S) {
    if (eval(h, ip, ex.feature, cap) != ex.label && ++wrong > stop_above) return std::nullopt;
  }
  return wrong;
}

/// Exact L_S(h(c, .)).
template <class I, class X>
Rational empirical_error_of(const Presentation<I, X>& h, IdealId c, const Sample<X>& S, unsigned cap = kDefaultCap) {
  if (S.empty()) return Rational(0);
  return Rational(static_cast<long long>(*mistakes(h, c, S, cap)), static_cast<long long>(S.size()));
}

/// Least ideal id whose hypothesis has zero empirical error on S.
template <class I, class X>
IdealId erm_realizable(const Presentation<I, X>& h, const Sample<X>& S, std::uint64_t ideal_budget,
                       unsigned cap = kDefaultCap) {
  const std::uint64_t limit = h.index_space.scan_limit(ideal_budget);
  for (std::uint64_t c = 0; c < limit; ++c) {
    if (mistakes(h, IdealId{c}, S, cap, 0)) return IdealId{c};
  }
  throw NotRealizableWithinBudget(h.label + ": no zero-error ideal among the first " + std::to_string(limit));
}

struct StagedOutput {
  /// stages[j] = z_j^j.
  std::vector<IdealId> stages;
  std::optional<std::size_t> stabilized_at;

  IdealId last() const { return stages.back(); }
};

namespace detail {

/// Mistakes of ideal c at the single precision k, or nullopt when some
/// example does not resolve there (or the count passes `stop_above`).
template <class I, class X>
std::optional<std::uint64_t> stage_mistakes(const Presentation<I, X>& h, const I& c,
                                            const std::vector<X>& features, const std::vector<std::uint8_t>& labels,
                                            unsigned k, std::uint64_t stop_above) {
  std::uint64_t wrong = 0;
  for (std::size_t t = 0; t < features.size(); ++t) {
    Resolution r = h.evaluate(c, features[t], k);
    if (r == Resolution::unknown) return std::nullopt;
    if ((r == Resolution::one ? 1 : 0) != labels[t] && ++wrong > stop_above) return std::nullopt;
  }
  return wrong;
}

}  // namespace detail

/// z_k^j: among the first j ideals whose empirical error is determined by the
/// radius-2^-k balls around them and the features, the least one attaining
/// the minimal error; ideal 0 when none is determined.
template <class I, class X>
IdealId erm_stage(const Presentation<I, X>& h, const Sample<X>& S, std::uint64_t j, unsigned k) {
  std::vector<X> features;
  std::vector<std::uint8_t> labels;
  features.reserve(S.size());
  for (const auto& ex : S) {
    features.push_back(ex.feature(k));
    labels.push_back(ex.label);
  }
  std::optional<std::uint64_t> best;
  IdealId arg{0};
  const std::uint64_t limit = h.index_space.scan_limit(j);
  for (std::uint64_t c = 0; c < limit; ++c) {
    const I ideal = h.index_space.ideal(IdealId{c});
    // An ideal is a constant description, so its radius-2^-k ball is handled
    // by the evaluator's own slack.
    auto w = detail::stage_mistakes(h, ideal, features, labels, k, best ? *best : UINT64_MAX);
    if (w && (!best || *w < *best)) {
      best = *w;
      arg = IdealId{c};
      if (*w == 0) break;
    }
  }
  return arg;
}

/// The diagonal (z_j^j)_{j < K}. stabilized_at is reported when the last
/// ceil(K/4) stages agree, and is the first index of that constant tail.
template <class I, class X>
StagedOutput erm_anytime(const Presentation<I, X>& h, const Sample<X>& S, std::size_t K) {
  if (K < 1) throw std::invalid_argument("erm_anytime needs K >= 1");
  StagedOutput out;
  out.stages.reserve(K);
  for (std::size_t j = 0; j < K; ++j) out.stages.push_back(erm_stage(h, S, j, static_cast<unsigned>(j)));
  std::size_t t = K - 1;
  while (t > 0 && out.stages[t - 1] == out.stages[K - 1]) --t;
  const std::size_t window = (K + 3) / 4;
  if (K - t >= window) out.stabilized_at = t;
  return out;
}

/// Scans ideals until count(U) distinct behaviors on the sample's features
/// have appeared, then returns the scanned ideal of least empirical error.
template <class I, class X>
IdealId erm_behavior_count(const Presentation<I, X>& h, const Sample<X>& S,
                           const std::function<std::uint64_t(const std::vector<PointDescription<X>>&)>& count_oracle,
                           std::uint64_t ideal_budget, unsigned cap = kDefaultCap) {
  std::vector<PointDescription<X>> U;
  U.reserve(S.size());
  for (const auto& ex : S) U.push_back(ex.feature);
  const std::uint64_t target = count_oracle(U);
  std::map<Behavior, IdealId> seen;
  const std::uint64_t limit = h.index_space.scan_limit(ideal_budget);
  for (std::uint64_t c = 0; c < limit && seen.size() < target; ++c) {
    const auto ip = h.index_point(IdealId{c});
    Behavior b;
    b.reserve(U.size());
    for (const auto& x : U) b.push_back(eval(h, ip, x, cap));
    seen.emplace(std::move(b), IdealId{c});
  }
  if (seen.size() < target) {
    throw BudgetExhaustedBeforeCount(h.label + ": found " + std::to_string(seen.size()) + " of " +
                                     std::to_string(target) + " behaviors");
  }
  std::optional<std::uint64_t> best;
  IdealId arg{0};
  for (const auto& [b, id] : seen) {
    std::uint64_t wrong = 0;
    for (std::size_t t = 0; t < b.size(); ++t) wrong += (b[t] != S[t].label);
    if (!best || wrong < *best || (wrong == *best && id < arg)) {
      best = wrong;
      arg = id;
    }
  }
  return arg;
}

/// True iff the stump at q labels every example of S correctly; comparisons
/// are decided with compare_gt.
inline bool stump_consistent(const Rational& q, const Sample<Rational>& S, unsigned cap) {
  for (const auto& ex : S) {
    Tri t = compare_gt(as_real(ex.feature), q, cap);
    if (t == Tri::unresolved) throw PrecisionExhausted("stump comparison against " + q.str() + " unresolved");
    if ((t == Tri::true_ ? 1 : 0) != ex.label) return false;
  }
  return true;
}

/// Least i such that the stump at q_i has zero empirical error on S.
inline IdealId stump_proper_learner(const Sample<Rational>& S, const RationalEnumeration& enumeration,
                                    unsigned cap = kDefaultCap) {
  for (std::size_t i = 0; i < enumeration.size(); ++i) {
    if (stump_consistent(enumeration.at(IdealId{i}), S, cap)) return IdealId{i};
  }
  throw NotRealizableWithinBudget("no consistent stump among the first " + std::to_string(enumeration.size()) +
                                  " rationals");
}

/// floor(2^l q) / 2^l.
inline Rational alpha(const Rational& q, std::uint64_t l) {
  const Rational scale = pow2(static_cast<long long>(l));
  return Rational((q * scale).floor()) / scale;
}

/// c(S): the least-index zero-error rational of the enumeration, 0 if none.
inline Rational least_zero_error_rational(const Sample<Rational>& S, const RationalEnumeration& enumeration,
                                          unsigned cap = kDefaultCap) {
  for (const auto& q : enumeration.values()) {
    if (stump_consistent(q, S, cap)) return q;
  }
  return Rational(0);
}

/// The threshold c*(S, e_len(S)) = alpha(c(S), e_len(S)).
inline Rational coarsened_cutoff(const Sample<Rational>& S, const HaltingEnumeration& halting,
                                 const RationalEnumeration& enumeration, unsigned cap = kDefaultCap) {
  if (S.size() >= halting.entries.size()) {
    throw EnumerationTooShort("halting enumeration has " + std::to_string(halting.entries.size()) +
                              " entries; sample length is " + std::to_string(S.size()));
  }
  const std::uint64_t ell = halting.entries[S.size()].program;
  return alpha(least_zero_error_rational(S, enumeration, cap), ell);
}

/// A(S, x) = 1 iff x > c*(S, e_len(S)), with c computed under the enumeration
/// that lists 1/3 first.
inline std::uint8_t coarsened_stump_learner(const Sample<Rational>& S, const PointDescription<Rational>& x,
                                            const HaltingEnumeration& halting, unsigned cap = kDefaultCap,
                                            const RationalEnumeration& enumeration = RationalEnumeration::third_first()) {
  const Rational cut = coarsened_cutoff(S, halting, enumeration, cap);
  Tri t = compare_gt(as_real(x), cut, cap);
  if (t == Tri::unresolved) throw PrecisionExhausted("coarsened learner comparison unresolved");
  return t == Tri::true_ ? 1 : 0;
}

template <class X>
using ProperLearner = std::function<IdealId(const Sample<X>&)>;

template <class X>
using Learner = std::function<std::uint8_t(const Sample<X>&, const PointDescription<X>&)>;

/// A(S, x) = h(P(S), x).
template <class I, class X>
Learner<X> induced_learner(const Presentation<I, X>& h, ProperLearner<X> P, unsigned cap = kDefaultCap) {
  return [h, P = std::move(P), cap](const Sample<X>& S, const PointDescription<X>& x) {
    return eval_ideal(h, P(S), x, cap);
  };
}

}  // namespace cpac
