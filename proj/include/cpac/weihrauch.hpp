// SPDX-License-Identifier: Apache-2.0
//
// Realizers as monotone transducers on finite name prefixes, the composition
// H o G o K of a strong reduction, parallelization over the shared pairing,
// witness-assisted limits, and a finite-prefix reduction checker.
//
// A name is a sequence of naturals. A transducer maps each finite input prefix
// to the output prefix it has committed to; extending the input may only
// extend the output.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpac/encoding.hpp"
#include "cpac/error.hpp"
#include "cpac/exact.hpp"
#include "cpac/hypotheses.hpp"
#include "cpac/learners.hpp"
#include "cpac/spaces.hpp"

namespace cpac {

using Name = std::vector<Natural>;

inline bool is_prefix(const Name& a, const Name& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

struct Transducer {
  std::string label;
  std::function<Name(const Name&)> step;

  Name operator()(const Name& prefix) const { return step(prefix); }
};

inline Transducer identity_transducer() {
  return {"id", [](const Name& p) { return p; }};
}

/// Keeps the symbols at even positions.
inline Transducer drop_odd_transducer() {
  return {"even-positions", [](const Name& p) {
            Name out;
            for (std::size_t k = 0; k < p.size(); k += 2) out.push_back(p[k]);
            return out;
          }};
}

inline Transducer compose(const Transducer& H, const Transducer& G, const Transducer& K) {
  return {H.label + " . " + G.label + " . " + K.label, [H, G, K](const Name& p) { return H(G(K(p))); }};
}

/// Checks output(p) is a prefix of output(q) for every prefix p of `input`.
inline std::optional<std::size_t> monotonicity_violation(const Transducer& T, const Name& input) {
  Name prev = T(Name{});
  for (std::size_t n = 1; n <= input.size(); ++n) {
    Name cur = T(Name(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(n)));
    if (!is_prefix(prev, cur)) return n;
    prev = std::move(cur);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parallelization
//
// Input: symbol t of the combined name is symbol j of coordinate c, where
// (c, j) = unpair(t). Output: events pair(c, y), one per symbol y that G
// emits on coordinate c, in the order they become available while the input
// is read left to right. A coordinate's first event batch is G's output on its
// first symbol.

/// Interleaves per-coordinate prefixes; stops at the first missing symbol.
inline Name interleave(const std::vector<Name>& coords) {
  Name out;
  for (std::uint64_t t = 0;; ++t) {
    auto [c, j] = unpair(t);
    if (c >= coords.size() || j >= coords[c].size()) return out;
    out.push_back(coords[c][j]);
  }
}

/// Splits a parallel output back into per-coordinate outputs.
inline std::map<std::uint64_t, Name> split_events(const Name& events) {
  std::map<std::uint64_t, Name> out;
  for (const auto& ev : events) {
    auto [c, y] = unpair(ev);
    out[static_cast<std::uint64_t>(c)].push_back(y);
  }
  return out;
}

inline Transducer parallelize(const Transducer& G) {
  return {"par(" + G.label + ")", [G](const Name& p) {
            std::map<std::uint64_t, Name> inputs;
            std::map<std::uint64_t, std::size_t> emitted;
            Name out;
            for (std::uint64_t t = 0; t < p.size(); ++t) {
              const auto c = unpair(t).first;
              inputs[c].push_back(p[t]);
              Name y = G(inputs[c]);
              std::size_t& done = emitted[c];
              for (std::size_t k = done; k < y.size(); ++k) out.push_back(pair(Natural(c), y[k]));
              done = std::max(done, y.size());
            }
            return out;
          }};
}

// ---------------------------------------------------------------------------
// Limits

/// The limit of seq, read off at the witnessed stabilization points:
/// p(i) = seq(N(i + 2))(i + 2), which is within 2^-(i+1) of the limit when
/// every seq(n) with n >= N(i + 2) is within 2^-(i+2) of it. Points after
/// each witnessed index are spot-checked up to `depth`; a later point more
/// than 2^-i from the read-off point violates the witness.
template <class Ideal>
PointDescription<Ideal> lim_with_witness(const MetricSpace<Ideal>& space,
                                         std::function<PointDescription<Ideal>(std::uint64_t)> seq,
                                         std::function<std::uint64_t(unsigned)> modulus, unsigned depth = 12,
                                         std::uint64_t lookahead = 8) {
  for (unsigned i = 0; i <= depth; ++i) {
    const unsigned k = i + 2;
    const std::uint64_t N = modulus(k);
    const Ideal anchor = seq(N)(k);
    for (std::uint64_t n = N + 1; n <= N + lookahead; ++n) {
      ExtendedReal d = space.distance(seq(n)(k), anchor);
      Rational lo;
      if (d.is_exact_infinity()) {
        throw WitnessViolation("sequence element " + std::to_string(n) + " is at infinite distance");
      }
      if (d.exact_value()) {
        lo = *d.exact_value();
      } else {
        auto c = d.classify(k + 8);
        if (std::holds_alternative<ExtendedReal::InfiniteSoFar>(c)) {
          throw WitnessViolation("sequence element " + std::to_string(n) + " is at infinite distance");
        }
        lo = std::get<ExtendedReal::FiniteSoFar>(c).interval.lo;
      }
      if (lo > pow2(-static_cast<long long>(i))) {
        throw WitnessViolation("element " + std::to_string(n) + " lies " + lo.str() + " from element " +
                               std::to_string(N) + " beyond the witnessed radius at precision " + std::to_string(i));
      }
    }
  }
  return PointDescription<Ideal>([seq = std::move(seq), modulus = std::move(modulus)](unsigned i) {
    return seq(modulus(i + 2))(i + 2);
  });
}

// ---------------------------------------------------------------------------
// Reductions

struct StrongReduction {
  Transducer pre;   // K
  Transducer post;  // H
};

struct ReductionReport {
  bool agree = true;
  std::size_t inputs_checked = 0;
  std::size_t symbols_compared = 0;
  std::optional<std::size_t> input_index;
  std::optional<std::size_t> position;
  std::optional<Natural> expected;
  std::optional<Natural> got;
};

/// Compares H(G(K(p))) with F(p) on each input prefix, over the positions
/// below `depth` that both have emitted.
inline ReductionReport check_reduction(const Transducer& F, const Transducer& G, const StrongReduction& R,
                                       const std::vector<Name>& inputs, std::size_t depth) {
  ReductionReport rep;
  const Transducer composed = compose(R.post, G, R.pre);
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const Name want = F(inputs[n]);
    const Name have = composed(inputs[n]);
    const std::size_t common = std::min({want.size(), have.size(), depth});
    ++rep.inputs_checked;
    for (std::size_t k = 0; k < common; ++k) {
      ++rep.symbols_compared;
      if (want[k] != have[k]) {
        rep.agree = false;
        rep.input_index = n;
        rep.position = k;
        rep.expected = want[k];
        rep.got = have[k];
        return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The staged-ERM scenario
//
// Sample name: [n, y_1, ..., y_n, then for precision k = 0, 1, ... the block
// of n symbols pair(zigzag(num), den - 1) for the approximants x_t(k)].
// K turns a sample prefix into the interleaved name of the stage sequence
// (point s holds the constant ideal z_s^s); the lim oracle reads the limit
// off with a witness; H is the identity. The target realizer runs realizable
// ERM on the decoded prefix.

inline Natural encode_rational(const Rational& q) { return pair(zigzag(q.numerator()), Natural(q.denominator() - 1)); }

inline Rational decode_rational(const Natural& n) {
  auto [z, d] = unpair(n);
  return Rational(unzigzag(z), BigInt(d + 1));
}

/// The sample name truncated after `blocks` complete precision blocks.
inline Name stump_sample_name(const Sample<Rational>& S, unsigned blocks) {
  Name out;
  out.push_back(Natural(S.size()));
  for (const auto& ex : S) out.push_back(Natural(ex.label));
  for (unsigned k = 0; k < blocks; ++k) {
    for (const auto& ex : S) out.push_back(encode_rational(ex.feature(k)));
  }
  return out;
}

struct DecodedSample {
  Sample<Rational> sample;
  /// Number of complete precision blocks read.
  unsigned blocks = 0;
};

/// Decodes a sample-name prefix; features report their last available
/// approximant beyond the decoded precision.
inline std::optional<DecodedSample> decode_stump_sample(const Name& p) {
  if (p.empty()) return std::nullopt;
  const auto n = static_cast<std::size_t>(p[0]);
  if (p.size() < 1 + n) return std::nullopt;
  const std::size_t blocks = n == 0 ? 0 : (p.size() - 1 - n) / n;
  if (n > 0 && blocks == 0) return std::nullopt;
  DecodedSample d;
  d.blocks = static_cast<unsigned>(blocks);
  for (std::size_t t = 0; t < n; ++t) {
    auto approx = std::make_shared<std::vector<Rational>>();
    for (std::size_t k = 0; k < blocks; ++k) approx->push_back(decode_rational(p[1 + n + k * n + t]));
    PointDescription<Rational> x([approx](unsigned i) { return (*approx)[std::min<std::size_t>(i, approx->size() - 1)]; });
    d.sample.emplace_back(std::move(x), static_cast<std::uint8_t>(p[1 + t]));
  }
  return d;
}

/// K: stages z_s^s for s below the number of decoded blocks, emitted as the
/// interleaved name of the point sequence (position pair(s, i) holds z_s^s).
inline Transducer staged_erm_stage_builder(const StumpPresentation& h) {
  return {"stage-builder", [h](const Name& p) {
            Name out;
            auto d = decode_stump_sample(p);
            if (!d) return out;
            const std::size_t stages = d->sample.empty() ? 64 : d->blocks;
            if (stages == 0) return out;
            const StagedOutput st = erm_anytime(h, d->sample, stages);
            for (std::uint64_t t = 0;; ++t) {
              auto [s, i] = unpair(t);
              if (s >= stages || i >= stages) break;
              out.push_back(Natural(st.stages[s].index));
            }
            return out;
          }};
}

/// G: lim on interleaved point-sequence names, using the witness N; output
/// position i is point N(i + 2) at precision i + 2.
inline Transducer lim_oracle(std::function<std::uint64_t(unsigned)> modulus) {
  return {"lim[witness]", [modulus = std::move(modulus)](const Name& p) {
            Name out;
            for (unsigned i = 0;; ++i) {
              const std::uint64_t t = pair(modulus(i + 2), static_cast<std::uint64_t>(i + 2));
              if (t >= p.size()) break;
              out.push_back(p[t]);
            }
            return out;
          }};
}

/// F: realizable ERM on the decoded prefix; one output symbol per complete
/// precision block once the answer is determined at that precision.
inline Transducer staged_erm_target(const StumpPresentation& h, std::uint64_t ideal_budget) {
  return {"erm-realizable", [h, ideal_budget](const Name& p) {
            Name out;
            auto d = decode_stump_sample(p);
            if (!d) return out;
            const unsigned blocks = d->sample.empty() ? 64 : d->blocks;
            if (blocks == 0) return out;
            try {
              const IdealId z = erm_realizable(h, d->sample, ideal_budget, blocks - 1);
              out.assign(blocks, Natural(z.index));
            } catch (const PrecisionExhausted&) {
              out.clear();
            }
            return out;
          }};
}

/// H that corrupts position `at` by adding 1.
inline Transducer corrupt_at(std::size_t at) {
  return {"corrupt@" + std::to_string(at), [at](const Name& p) {
            Name out = p;
            if (out.size() > at) out[at] += 1;
            return out;
          }};
}

/// First stage index after which the computed stages are constant.
inline std::uint64_t stabilization_index(const StagedOutput& st) {
  std::size_t t = st.stages.size() - 1;
  while (t > 0 && st.stages[t - 1] == st.stages.back()) --t;
  return t;
}

}  // namespace cpac
