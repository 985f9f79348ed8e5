// SPDX-License-Identifier: Apache-2.0
//
// Losses, distributions, seeded sampling, the ERM sample-size formula, Monte
// Carlo PAC validation, and the three procedures that recover halting
// information from a learner plus a sample function.
//
// Loss paths are exact rationals throughout. Floating point appears only in
// the closed-form sample bound (which needs logarithms) and in the optional
// binomial decision rule.

#pragma once

#include <boost/math/distributions/binomial.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cpac/error.hpp"
#include "cpac/exact.hpp"
#include "cpac/hypotheses.hpp"
#include "cpac/learners.hpp"
#include "cpac/machines.hpp"
#include "cpac/spaces.hpp"

namespace cpac {

// ---------------------------------------------------------------------------
// Losses

template <class X>
using Hypothesis = std::function<std::uint8_t(const PointDescription<X>&)>;

/// L_S(h) = (number of disagreements) / |S|.
template <class X>
Rational empirical_error(const Hypothesis<X>& h, const Sample<X>& S) {
  if (S.empty()) throw std::invalid_argument("empirical error of an empty sample");
  long long wrong = 0;
  for (const auto& ex : S) wrong += (h(ex.feature) != ex.label);
  return Rational(wrong, static_cast<long long>(S.size()));
}

/// The stump at q as a hypothesis, decided with compare_gt.
inline Hypothesis<Rational> stump_hypothesis(Rational q, unsigned cap = kDefaultCap) {
  return [q = std::move(q), cap](const PointDescription<Rational>& x) -> std::uint8_t {
    Tri t = compare_gt(as_real(x), q, cap);
    if (t == Tri::unresolved) throw PrecisionExhausted("stump comparison against " + q.str() + " unresolved");
    return t == Tri::true_ ? 1 : 0;
  };
}

template <class X>
struct Atom {
  PointDescription<X> feature;
  std::uint8_t label = 0;
  Rational weight;
};

template <class X>
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<Atom<X>> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("distribution without atoms");
    Rational total;
    for (const auto& a : atoms_) {
      if (a.weight.sign() <= 0) throw std::invalid_argument("atom weight must be positive");
      if (a.label > 1) throw std::invalid_argument("atom label must be 0 or 1");
      total += a.weight;
    }
    if (total != Rational(1)) throw std::invalid_argument("atom weights sum to " + total.str());
  }

  static DiscreteDistribution pointmass(PointDescription<X> x, std::uint8_t label) {
    return DiscreteDistribution({Atom<X>{std::move(x), label, Rational(1)}});
  }

  const std::vector<Atom<X>>& atoms() const { return atoms_; }

 private:
  std::vector<Atom<X>> atoms_;
};

/// L_D(h) = sum of the weights of the atoms h mislabels.
template <class X>
Rational true_error_discrete(const Hypothesis<X>& h, const DiscreteDistribution<X>& D) {
  Rational err;
  for (const auto& a : D.atoms()) {
    if (h(a.feature) != a.label) err += a.weight;
  }
  return err;
}

struct Piece {
  Rational lo;  // inclusive
  Rational hi;  // exclusive
  Rational density;
};

/// Absolutely continuous feature law with piecewise-constant density bounded
/// by M; labels are 1 exactly above the cutoff.
class PiecewiseUniformDistribution {
 public:
  PiecewiseUniformDistribution(std::vector<Piece> pieces, Rational cutoff, Rational density_bound)
      : pieces_(std::move(pieces)), cutoff_(std::move(cutoff)), bound_(std::move(density_bound)) {
    if (pieces_.empty()) throw std::invalid_argument("distribution without pieces");
    std::sort(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    Rational total;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const Piece& p = pieces_[k];
      if (!(p.lo < p.hi)) throw std::invalid_argument("empty or reversed piece");
      if (p.density.sign() < 0 || p.density > bound_) throw std::invalid_argument("density outside [0, M]");
      if (k > 0 && pieces_[k - 1].hi > p.lo) throw std::invalid_argument("overlapping pieces");
      total += p.density * (p.hi - p.lo);
    }
    if (total != Rational(1)) throw std::invalid_argument("pieces carry mass " + total.str());
  }

  static PiecewiseUniformDistribution uniform(const Rational& lo, const Rational& hi, const Rational& cutoff) {
    const Rational w = hi - lo;
    return PiecewiseUniformDistribution({Piece{lo, hi, Rational(1) / w}}, cutoff, Rational(1) / w);
  }

  const std::vector<Piece>& pieces() const { return pieces_; }
  const Rational& cutoff() const { return cutoff_; }
  const Rational& density_bound() const { return bound_; }

  /// Mass of the half-open interval (a, b].
  Rational mass_between(const Rational& a, const Rational& b) const {
    Rational m;
    for (const auto& p : pieces_) {
      Rational lo = max(a, p.lo);
      Rational hi = min(b, p.hi);
      if (lo < hi) m += p.density * (hi - lo);
    }
    return m;
  }

 private:
  std::vector<Piece> pieces_;
  Rational cutoff_;
  Rational bound_;
};

/// The M = 4 law used by the Monte Carlo check: cutoff 1/3 with most mass
/// packed right above it.
inline PiecewiseUniformDistribution concentrated_third_distribution() {
  return PiecewiseUniformDistribution({Piece{Rational(0), Rational(1, 4), Rational(1)},
                                       Piece{Rational(1, 4), Rational(3, 8), Rational(4)},
                                       Piece{Rational(3, 8), Rational(1), Rational(2, 5)}},
                                      Rational(1, 3), Rational(4));
}

/// Exact L_D of the stump at q: the mass between q and the cutoff.
inline Rational true_error_stump(const Rational& q, const PiecewiseUniformDistribution& D) {
  return D.mass_between(min(q, D.cutoff()), max(q, D.cutoff()));
}

/// inf over rational stumps; attained at the cutoff or a piece endpoint.
inline Rational best_in_class_stump(const PiecewiseUniformDistribution& D) {
  Rational best = true_error_stump(D.cutoff(), D);
  for (const auto& p : D.pieces()) {
    best = min(best, true_error_stump(p.lo, D));
    best = min(best, true_error_stump(p.hi, D));
  }
  return best;
}

/// Minimum true error over the ideals below the budget; budget-relative.
template <class I, class X>
Rational best_in_class_discrete(const Presentation<I, X>& h, const DiscreteDistribution<X>& D,
                                std::uint64_t ideal_budget, unsigned cap = kDefaultCap) {
  std::optional<Rational> best;
  const std::uint64_t limit = h.index_space.scan_limit(ideal_budget);
  for (std::uint64_t c = 0; c < limit; ++c) {
    const auto ip = h.index_point(IdealId{c});
    Hypothesis<X> hc = [&](const PointDescription<X>& x) { return eval(h, ip, x, cap); };
    Rational e = true_error_discrete(hc, D);
    if (!best || e < *best) best = e;
    if (best->is_zero()) break;
  }
  return best.value_or(Rational(1));
}

// ---------------------------------------------------------------------------
// Sample-size formula

enum class LogBase : std::uint8_t { natural, two, ten };

inline const char* to_string(LogBase b) {
  switch (b) {
    case LogBase::two: return "2";
    case LogBase::ten: return "10";
    default: return "e";
  }
}

/// ceil of 4 (32d/eps^2) log(64d/eps^2) + (8/eps^2)(8d log(eps/d) + 2 log(4/delta)).
inline std::uint64_t erm_sample_bound(std::uint64_t d, const Rational& eps, const Rational& delta,
                                      LogBase base = LogBase::natural) {
  using F = boost::multiprecision::cpp_bin_float_100;
  if (d < 1) throw std::invalid_argument("sample bound needs d >= 1");
  if (!(Rational(0) < eps && eps < Rational(1)) || !(Rational(0) < delta && delta < Rational(1))) {
    throw std::invalid_argument("sample bound needs eps, delta in (0, 1)");
  }
  auto to_f = [](const Rational& q) { return F(q.numerator()) / F(q.denominator()); };
  auto lg = [base](const F& v) {
    F l = boost::multiprecision::log(v);
    if (base == LogBase::two) l /= boost::multiprecision::log(F(2));
    if (base == LogBase::ten) l /= boost::multiprecision::log(F(10));
    return l;
  };
  const F e = to_f(eps);
  const F dl = to_f(delta);
  const F D(d);
  const F e2 = e * e;
  const F value = 4 * (32 * D / e2) * lg(64 * D / e2) + (8 / e2) * (8 * D * lg(e / D) + 2 * lg(4 / dl));
  if (value <= 0) {
    throw NonpositiveBound("sample bound is nonpositive at d=" + std::to_string(d) + ", eps=" + eps.str() +
                           ", delta=" + delta.str());
  }
  const F c = boost::multiprecision::ceil(value);
  if (c > F(UINT64_MAX)) throw std::overflow_error("sample bound exceeds 64 bits");
  return static_cast<std::uint64_t>(c);
}

// ---------------------------------------------------------------------------
// Sampling

/// SplitMix64 finalizer, used to derive per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(master ^ splitmix64(trial + 1));
}

/// Uniform integer in [0, n) by rejection; stable across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below(0)");
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  while (true) {
    std::uint64_t r = gen();
    if (r < limit) return r % n;
  }
}

/// u = r / 2^64 as an exact rational.
inline Rational unit_from_bits(std::uint64_t r) { return Rational(BigInt(r), BigInt(1) << 64); }

template <class X>
Sample<X> draw_sample(const DiscreteDistribution<X>& D, std::uint64_t m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<Rational> cumulative;
  Rational run;
  for (const auto& a : D.atoms()) {
    run += a.weight;
    cumulative.push_back(run);
  }
  Sample<X> S;
  S.reserve(m);
  for (std::uint64_t t = 0; t < m; ++t) {
    const Rational u = unit_from_bits(gen());
    std::size_t k = 0;
    while (k + 1 < cumulative.size() && !(u < cumulative[k])) ++k;
    S.emplace_back(D.atoms()[k].feature, D.atoms()[k].label);
  }
  return S;
}

/// Features are dyadic points of a 2^-32 grid inside the chosen piece, each
/// nudged by a generic offset smaller than the grid step so that every
/// comparison with a rational resolves.
inline Sample<Rational> draw_sample(const PiecewiseUniformDistribution& D, std::uint64_t m, std::uint64_t seed,
                                    unsigned label_cap = 256) {
  std::mt19937_64 gen(seed);
  std::vector<Rational> cumulative;
  std::vector<unsigned> width_exp;
  Rational run;
  for (const auto& p : D.pieces()) {
    run += p.density * (p.hi - p.lo);
    cumulative.push_back(run);
    unsigned t = 0;
    while (pow2(-static_cast<long long>(t)) > p.hi - p.lo) ++t;
    width_exp.push_back(t);
  }
  Sample<Rational> S;
  S.reserve(m);
  for (std::uint64_t n = 0; n < m; ++n) {
    const Rational u = unit_from_bits(gen());
    std::size_t k = 0;
    while (k + 1 < cumulative.size() && !(u < cumulative[k])) ++k;
    const Piece& p = D.pieces()[k];
    const Rational v(BigInt(gen() >> 32), BigInt(1) << 32);
    RealStream x = generic_real(p.lo + (p.hi - p.lo) * v, 33 + width_exp[k]);
    Tri above = compare_gt(x, D.cutoff(), label_cap);
    if (above == Tri::unresolved) throw PrecisionExhausted("sampled feature too close to the cutoff");
    S.emplace_back(real_point(std::move(x)), above == Tri::true_ ? 1 : 0);
  }
  return S;
}

// ---------------------------------------------------------------------------
// Monte Carlo validation

template <class X, class Hyp>
struct PacProblem {
  std::function<Sample<X>(std::uint64_t m, std::uint64_t seed)> draw;
  std::function<Rational(const Hyp&)> true_error;
  std::function<Rational(const Hyp&, const Sample<X>&)> empirical_error;
  Rational best_in_class;
};

/// Stump learning over a piecewise-uniform law; hypotheses are cutoffs.
inline PacProblem<Rational, Rational> stump_problem(const PiecewiseUniformDistribution& D, unsigned cap = kDefaultCap) {
  PacProblem<Rational, Rational> p;
  p.draw = [D](std::uint64_t m, std::uint64_t seed) { return draw_sample(D, m, seed); };
  p.true_error = [D](const Rational& q) { return true_error_stump(q, D); };
  p.empirical_error = [cap](const Rational& q, const Sample<Rational>& S) {
    if (S.empty()) return Rational(0);
    return empirical_error(stump_hypothesis(q, cap), S);
  };
  p.best_in_class = best_in_class_stump(D);
  return p;
}

struct PacTrialRow {
  std::uint64_t trial_id = 0;
  std::uint64_t m = 0;
  Rational epsilon;
  Rational delta;
  Rational empirical_error;
  Rational true_error;
  Rational best_in_class;
  bool pass = false;
  /// Set when the learner raised instead of answering.
  std::string learner_error;
};

struct PacReport {
  std::vector<PacTrialRow> rows;
  std::uint64_t failures = 0;
  std::uint64_t learner_errors = 0;
  Rational failure_rate;
  /// failure_rate <= delta + 3 sqrt(delta (1 - delta) / T).
  bool verdict = false;
  /// One-sided exact binomial test at 99%: failure counts this high are not
  /// implausible when the true failure probability is delta.
  bool strict_verdict = false;
};

inline bool within_three_sigma(const Rational& rate, const Rational& delta, std::uint64_t T) {
  const Rational excess = rate - delta;
  if (excess.sign() <= 0) return true;
  return excess * excess <= Rational(9) * delta * (Rational(1) - delta) / Rational(static_cast<long long>(T));
}

inline bool binomial_plausible(std::uint64_t failures, std::uint64_t T, const Rational& delta) {
  if (failures == 0) return true;
  boost::math::binomial_distribution<double> law(static_cast<double>(T), delta.to_double());
  const double tail = boost::math::cdf(boost::math::complement(law, static_cast<double>(failures - 1)));
  return tail >= 0.01;
}

/// Runs T seeded trials: draw S of size m, train, compare the exact true
/// error with best_in_class + eps. Trials are independent; `threads` only
/// changes wall time.
template <class X, class Hyp>
PacReport pac_validate(const std::function<Hyp(const Sample<X>&)>& learner, const PacProblem<X, Hyp>& problem,
                       const Rational& eps, const Rational& delta, std::uint64_t m, std::uint64_t T,
                       std::uint64_t seed, unsigned threads = 1) {
  if (T < 1) throw std::invalid_argument("pac_validate needs T >= 1");
  PacReport rep;
  rep.rows.resize(T);
  auto one = [&](std::uint64_t t) {
    PacTrialRow& row = rep.rows[t];
    row.trial_id = t;
    row.m = m;
    row.epsilon = eps;
    row.delta = delta;
    row.best_in_class = problem.best_in_class;
    try {
      Sample<X> S = problem.draw(m, trial_seed(seed, t));
      Hyp h = learner(S);
      row.empirical_error = problem.empirical_error(h, S);
      row.true_error = problem.true_error(h);
      row.pass = row.true_error <= problem.best_in_class + eps;
    } catch (const std::exception& e) {
      row.learner_error = e.what();
      row.pass = false;
    }
  };
  threads = std::max(1U, threads);
  if (threads == 1) {
    for (std::uint64_t t = 0; t < T; ++t) one(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t t = w; t < T; t += threads) one(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& row : rep.rows) {
    if (!row.pass) ++rep.failures;
    if (!row.learner_error.empty()) ++rep.learner_errors;
  }
  rep.failure_rate = Rational(static_cast<long long>(rep.failures), static_cast<long long>(T));
  rep.verdict = within_three_sigma(rep.failure_rate, delta, T);
  rep.strict_verdict = binomial_plausible(rep.failures, T, delta);
  return rep;
}

inline const char* pac_row_header() {
  return "trial_id,m,epsilon,delta,empirical_error,true_error,best_in_class,pass";
}

inline std::string pac_row_csv(const PacTrialRow& r) {
  std::ostringstream os;
  os << r.trial_id << ',' << r.m << ',' << r.epsilon << ',' << r.delta << ',' << r.empirical_error << ','
     << r.true_error << ',' << r.best_in_class << ',' << (r.pass ? 1 : 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Sample functions

struct SampleFunctionSpec {
  enum class Kind : std::uint8_t { closed_form, table, budgeted_halting };
  using Fn = std::function<std::optional<std::uint64_t>(const Rational&, const Rational&)>;

  Kind kind = Kind::closed_form;
  std::string label;
  Fn evaluate;

  /// m(eps, delta); throws where the function is undefined.
  std::uint64_t operator()(const Rational& eps, const Rational& delta) const {
    auto v = evaluate(eps, delta);
    if (!v) throw std::domain_error(label + " undefined at (" + eps.str() + ", " + delta.str() + ")");
    return *v;
  }

  static SampleFunctionSpec closed_form(std::uint64_t d, LogBase base = LogBase::natural) {
    return {Kind::closed_form, "erm-bound(d=" + std::to_string(d) + ", log " + to_string(base) + ")",
            [d, base](const Rational& e, const Rational& dl) -> std::optional<std::uint64_t> {
              return erm_sample_bound(d, e, dl, base);
            }};
  }

  /// Step function: row i covers eps <= eps_breaks[i] (the last row covers
  /// the rest), likewise columns for delta.
  static SampleFunctionSpec table(std::vector<Rational> eps_breaks, std::vector<Rational> delta_breaks,
                                  std::vector<std::vector<std::uint64_t>> values) {
    if (values.size() != eps_breaks.size() + 1) throw std::invalid_argument("table rows mismatch");
    for (const auto& row : values) {
      if (row.size() != delta_breaks.size() + 1) throw std::invalid_argument("table columns mismatch");
    }
    return {Kind::table, "table",
            [eps_breaks, delta_breaks, values](const Rational& e, const Rational& dl) -> std::optional<std::uint64_t> {
              std::size_t i = 0;
              while (i < eps_breaks.size() && eps_breaks[i] < e) ++i;
              std::size_t j = 0;
              while (j < delta_breaks.size() && delta_breaks[j] < dl) ++j;
              return values[i][j];
            }};
  }

  static SampleFunctionSpec constant(std::uint64_t v) { return table({}, {}, {{v}}); }
};

/// Smallest N with M 2^-e_i <= eta for every listed i >= N.
inline std::uint64_t coarsening_threshold(const HaltingEnumeration& halting, const Rational& eta,
                                          const Rational& density_bound) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < halting.entries.size(); ++i) {
    if (density_bound * pow2(-static_cast<long long>(halting.entries[i].program)) > eta) n = i + 1;
  }
  return n;
}

/// Sample function for the coarsened stump learner over densities bounded by
/// M: enough samples for the plain stump learner at eps/2, and enough that
/// the coarsening error M 2^-e_len(S) is at most eps/2. It reads the halting
/// enumeration, so it is computable only because that enumeration is
/// budgeted.
inline SampleFunctionSpec coarsened_sample_function(const HaltingEnumeration& halting, const Rational& density_bound) {
  return {SampleFunctionSpec::Kind::budgeted_halting, "coarsened-stump(budgeted halting)",
          [halting, density_bound](const Rational& e, const Rational& dl) -> std::optional<std::uint64_t> {
            const Rational half = e / Rational(2);
            return std::max(erm_sample_bound(1, half, dl), coarsening_threshold(halting, half, density_bound));
          }};
}

// ---------------------------------------------------------------------------
// Halting extraction

/// Proper learner for the halting class: least zero-error ideal, ideal 0
/// when none exists within the budget.
template <class I, class X>
ProperLearner<X> realizable_or_first(const Presentation<I, X>& h, std::uint64_t ideal_budget,
                                     unsigned cap = kDefaultCap) {
  return [h, ideal_budget, cap](const Sample<X>& S) {
    try {
      return erm_realizable(h, S, ideal_budget, cap);
    } catch (const NotRealizableWithinBudget&) {
      return IdealId{0};
    }
  };
}

/// For each k < n: train on M = m(eps, delta) copies of (k, 1), get z_k, and
/// output 1 iff z_k ~ k.
inline std::vector<std::uint8_t> extract_halting_prefix(const ProperLearner<std::uint64_t>& P,
                                                        const SampleFunctionSpec& m, std::uint64_t n,
                                                        const Rational& eps, const Rational& delta,
                                                        const HaltingClass& cls) {
  const std::uint64_t M = m(eps, delta);
  std::vector<std::uint8_t> bits;
  bits.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    Sample<std::uint64_t> S(M, LabeledExample<std::uint64_t>(PointDescription<std::uint64_t>::constant(k), 1));
    const std::uint64_t z = cls.presentation.index_space.ideal(P(S));
    bits.push_back(halt_time_equiv(z, k, cls.halting.s_max));
  }
  return bits;
}

/// Budgeted jump bits of z at the listed programs from one learner call per
/// program: if the learner's program differs, 0; else let t be the halt time
/// of its (program, oracle), and answer whether e halts with z within t.
inline std::vector<std::uint8_t> extract_jump_bits(const ProperLearner<OracleFeature>& P, const SampleFunctionSpec& m,
                                                   const OracleTape& z, const std::vector<std::uint64_t>& programs,
                                                   const Rational& eps, const Rational& delta,
                                                   const OracleHaltingClass& cls) {
  const std::uint64_t M = m(eps, delta);
  std::vector<std::uint8_t> bits;
  bits.reserve(programs.size());
  for (auto e : programs) {
    Sample<OracleFeature> S(M, LabeledExample<OracleFeature>(oracle_feature_point(e, z), 1));
    const OracleIdeal w = cls.presentation.index_space.ideal(P(S));
    if (w.program != e) {
      bits.push_back(0);
      continue;
    }
    auto t = halt_steps(run_oracle(e, OracleTape::from_sequence(w.oracle), 0, cls.s_max));
    if (!t) throw IndexNotHalting("learner returned a non-halting (program, oracle) pair");
    bits.push_back(is_halted(run_oracle(e, z, 0, *t)) ? 1 : 0);
  }
  return bits;
}

inline std::vector<std::uint8_t> extract_jump_prefix(const ProperLearner<OracleFeature>& P,
                                                     const SampleFunctionSpec& m, const OracleTape& z, std::uint64_t n,
                                                     const Rational& eps, const Rational& delta,
                                                     const OracleHaltingClass& cls) {
  std::vector<std::uint64_t> programs(n);
  for (std::uint64_t e = 0; e < n; ++e) programs[e] = e;
  return extract_jump_bits(P, m, z, programs, eps, delta, cls);
}

struct CoarseningLossRow {
  std::uint64_t k = 0;
  Rational loss;   // true loss of the stump at alpha(first, k)
  Rational bound;  // 2^-(k+2)
  bool holds = false;
};

/// Loss of the stump at alpha(q, k) under the uniform law on [0, 1] labeled
/// at q, against the lower bound 2^-(k+2) that the extraction relies on.
inline std::vector<CoarseningLossRow> coarsening_losses(const Rational& first, std::uint64_t k_max) {
  auto D = PiecewiseUniformDistribution::uniform(Rational(0), Rational(1), first);
  std::vector<CoarseningLossRow> rows;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    CoarseningLossRow r;
    r.k = k;
    r.loss = true_error_stump(alpha(first, k), D);
    r.bound = pow2(-static_cast<long long>(k + 2));
    r.holds = r.loss >= r.bound;
    rows.push_back(std::move(r));
  }
  return rows;
}

struct BadSampleFnResult {
  std::vector<std::uint8_t> bits;
  std::uint64_t m_n = 0;
  /// Enumeration positions i <= m_n that were inspected.
  std::uint64_t scanned = 0;
  /// 1/3-first run: loss lower bound holds for every k.
  bool bound_holds = false;
  /// Control run with 1/2 first: whether the same bound held.
  bool control_bound_holds = false;
  std::vector<CoarseningLossRow> losses;
  std::vector<CoarseningLossRow> control_losses;
};

/// m_n = m(2^-(n+2), delta); any e < n that halts appears as e_i with i <= m_n.
inline BadSampleFnResult bad_sample_fn_demo(std::uint64_t n, const Rational& delta, const HaltingEnumeration& halting,
                                            const Rational& density_bound = Rational(4), std::uint64_t k_max = 20) {
  BadSampleFnResult r;
  const SampleFunctionSpec m = coarsened_sample_function(halting, density_bound);
  r.m_n = m(pow2(-static_cast<long long>(n + 2)), delta);
  r.bits.assign(n, 0);
  const std::uint64_t stop = std::min<std::uint64_t>(r.m_n, halting.entries.size() - 1);
  for (std::uint64_t i = 0; i <= stop && i < halting.entries.size(); ++i) {
    ++r.scanned;
    if (halting.entries[i].program < n) r.bits[halting.entries[i].program] = 1;
  }
  r.losses = coarsening_losses(Rational(1, 3), k_max);
  r.control_losses = coarsening_losses(Rational(1, 2), k_max);
  r.bound_holds = std::all_of(r.losses.begin(), r.losses.end(), [](const auto& x) { return x.holds; });
  r.control_bound_holds =
      std::all_of(r.control_losses.begin(), r.control_losses.end(), [](const auto& x) { return x.holds; });
  return r;
}

// ---------------------------------------------------------------------------
// Rectangle covers of level sets

struct LevelRectangle {
  Rational eps_lo, eps_hi, delta_lo, delta_hi;
  std::uint64_t value = 0;
};

struct RectCoverReport {
  unsigned depth = 0;
  std::uint64_t grid_points = 0;
  std::uint64_t covered = 0;
  std::vector<LevelRectangle> rectangles;
  /// Number of distinct values n with a nonempty U_n.
  std::uint64_t levels = 0;
};

/// Covers the grid {i/2^depth : 0 < i < 2^depth}^2 with rectangles on which m
/// is constant. A box goes into U_n when all four corners take the value n
/// (sufficient for functions non-increasing in each coordinate); boxes are
/// split down to single grid cells, whose corners become degenerate
/// rectangles. Every rectangle is re-checked on its corners and center, then
/// every grid point must lie in some rectangle.
inline RectCoverReport rect_cover_check(const SampleFunctionSpec& m, unsigned depth) {
  if (depth < 1 || depth > 12) throw std::invalid_argument("rect_cover_check depth must be in [1, 12]");
  const std::uint64_t N = (std::uint64_t{1} << depth) - 1;  // grid points per axis
  const Rational step = pow2(-static_cast<long long>(depth));
  auto coord = [&](std::uint64_t i) { return step * Rational(static_cast<long long>(i)); };
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::optional<std::uint64_t>> memo;
  auto value = [&](std::uint64_t i, std::uint64_t j) {
    auto key = std::pair{i, j};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::optional<std::uint64_t> v;
    try {
      v = m.evaluate(coord(i), coord(j));
    } catch (const std::domain_error&) {
      v.reset();
    }
    memo.emplace(key, v);
    return v;
  };

  struct Box {
    std::uint64_t i0, i1, j0, j1, value;
  };
  std::vector<Box> boxes;
  std::function<void(std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t)> rec =
      [&](std::uint64_t i0, std::uint64_t i1, std::uint64_t j0, std::uint64_t j1) {
        auto a = value(i0, j0), b = value(i1, j1), c = value(i0, j1), d = value(i1, j0);
        if (a && b && c && d && *a == *b && *a == *c && *a == *d) {
          boxes.push_back({i0, i1, j0, j1, *a});
          return;
        }
        if (i1 - i0 <= 1 && j1 - j0 <= 1) {
          for (auto [i, j] : {std::pair{i0, j0}, std::pair{i1, j1}, std::pair{i0, j1}, std::pair{i1, j0}}) {
            if (auto v = value(i, j)) boxes.push_back({i, i, j, j, *v});
          }
          return;
        }
        const std::uint64_t im = (i0 + i1) / 2;
        const std::uint64_t jm = (j0 + j1) / 2;
        if (i1 - i0 >= 2 && j1 - j0 >= 2) {
          rec(i0, im, j0, jm);
          rec(im, i1, j0, jm);
          rec(i0, im, jm, j1);
          rec(im, i1, jm, j1);
        } else if (i1 - i0 >= 2) {
          rec(i0, im, j0, j1);
          rec(im, i1, j0, j1);
        } else {
          rec(i0, i1, j0, jm);
          rec(i0, i1, jm, j1);
        }
      };
  rec(1, N, 1, N);

  RectCoverReport rep;
  rep.depth = depth;
  rep.grid_points = N * N;
  std::set<std::uint64_t> levels;
  std::vector<std::uint8_t> hit(N * N, 0);
  for (const auto& bx : boxes) {
    const std::uint64_t ci = (bx.i0 + bx.i1) / 2, cj = (bx.j0 + bx.j1) / 2;
    for (auto [i, j] : {std::pair{bx.i0, bx.j0}, std::pair{bx.i1, bx.j1}, std::pair{bx.i0, bx.j1},
                        std::pair{bx.i1, bx.j0}, std::pair{ci, cj}}) {
      auto v = value(i, j);
      if (!v || *v != bx.value) {
        throw CoverGap("rectangle for level " + std::to_string(bx.value) + " contains (" + coord(i).str() + ", " +
                       coord(j).str() + ") outside its level set");
      }
    }
    for (std::uint64_t i = bx.i0; i <= bx.i1; ++i) {
      for (std::uint64_t j = bx.j0; j <= bx.j1; ++j) hit[(i - 1) * N + (j - 1)] = 1;
    }
    levels.insert(bx.value);
    rep.rectangles.push_back({coord(bx.i0), coord(bx.i1), coord(bx.j0), coord(bx.j1), bx.value});
  }
  for (std::uint64_t i = 1; i <= N; ++i) {
    for (std::uint64_t j = 1; j <= N; ++j) {
      if (!hit[(i - 1) * N + (j - 1)]) {
        throw CoverGap("grid point (" + coord(i).str() + ", " + coord(j).str() + ") lies in no level rectangle");
      }
      ++rep.covered;
    }
  }
  rep.levels = levels.size();
  return rep;
}

// ---------------------------------------------------------------------------
// Realizable stump corpus

struct StumpCorpusItem {
  Sample<Rational> sample;
  /// Grid positions j of the features generic(j/16, 8).
  std::vector<long long> positions;
  Rational cutoff;
};

/// `count` samples with distinct features generic(j/16, 8), j in [-48, 48],
/// sizes uniform in [1, max_size], labeled by a cutoff drawn from the first
/// `cutoff_pool` rationals of the diagonal enumeration.
inline std::vector<StumpCorpusItem> realizable_stump_corpus(std::size_t count, std::size_t max_size,
                                                            std::uint64_t seed, std::size_t cutoff_pool = 48) {
  const auto en = RationalEnumeration::diagonal(std::max<std::size_t>(cutoff_pool, 1));
  std::mt19937_64 gen(seed);
  std::vector<StumpCorpusItem> out;
  for (std::size_t c = 0; c < count; ++c) {
    StumpCorpusItem item;
    item.cutoff = en.at(IdealId{uniform_below(gen, en.size())});
    const std::size_t n = 1 + uniform_below(gen, std::min<std::size_t>(max_size, 97));
    std::vector<long long> grid(97);
    for (long long j = 0; j < 97; ++j) grid[j] = j - 48;
    for (std::size_t k = 0; k < n; ++k) {  // partial Fisher-Yates
      std::swap(grid[k], grid[k + uniform_below(gen, 97 - k)]);
    }
    for (std::size_t k = 0; k < n; ++k) {
      const long long j = grid[k];
      RealStream x = generic_real(Rational(j, 16), 8);
      const Tri above = compare_gt(x, item.cutoff, 256);
      item.positions.push_back(j);
      item.sample.emplace_back(real_point(std::move(x)), above == Tri::true_ ? 1 : 0);
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace cpac
