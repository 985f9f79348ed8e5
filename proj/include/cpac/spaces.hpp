// SPDX-License-Identifier: Apache-2.0
//
// Computable (extended) metric spaces as descriptors: an enumeration of ideal
// points plus a distance oracle returning extended-real presentations.
//
// A space is templated on the value type of its ideal points. Point
// descriptions are streams of ideal values rather than of ideal indices: a
// real described to precision 60 has a dyadic approximant whose position in
// any enumeration of Q is astronomically large, while the value itself is
// cheap. The index of an ideal value is still available where the enumeration
// supports it (see RationalEnumeration::index_of).

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cpac/encoding.hpp"
#include "cpac/error.hpp"
#include "cpac/exact.hpp"

namespace cpac {

/// Position of an ideal point in a space's enumeration.
struct IdealId {
  std::uint64_t index = 0;
  friend auto operator<=>(const IdealId&, const IdealId&) = default;
};

/// Structural facts a space can promise about its distances. They let
/// point_distance return exact answers where the generic bound would not.
struct SpaceTraits {
  /// Every pair of distinct ideal points is at least this far apart.
  std::optional<Rational> separation;
  bool ultrametric = false;
};

template <class Ideal>
class MetricSpace {
 public:
  using IdealFn = std::function<Ideal(IdealId)>;
  using DistanceFn = std::function<ExtendedReal(const Ideal&, const Ideal&)>;

  MetricSpace(std::string label, std::optional<std::uint64_t> ideal_count, IdealFn ideal,
              DistanceFn distance, SpaceTraits traits = {})
      : label_(std::move(label)),
        count_(ideal_count),
        ideal_(std::move(ideal)),
        distance_(std::move(distance)),
        traits_(std::move(traits)) {}

  const std::string& label() const { return label_; }
  /// nullopt for a countably infinite enumeration.
  std::optional<std::uint64_t> ideal_count() const { return count_; }
  const SpaceTraits& traits() const { return traits_; }

  Ideal ideal(IdealId id) const {
    if (count_ && id.index >= *count_) {
      throw std::out_of_range(label_ + ": ideal id " + std::to_string(id.index) + " out of range");
    }
    return ideal_(id);
  }
  ExtendedReal distance(const Ideal& a, const Ideal& b) const { return distance_(a, b); }
  ExtendedReal ideal_distance(IdealId i, IdealId j) const { return distance_(ideal(i), ideal(j)); }

  /// Number of ideal points visible under a scan budget.
  std::uint64_t scan_limit(std::uint64_t budget) const { return count_ ? std::min(*count_, budget) : budget; }

 private:
  std::string label_;
  std::optional<std::uint64_t> count_;
  IdealFn ideal_;
  DistanceFn distance_;
  SpaceTraits traits_;
};

/// A point given by a rapidly converging Cauchy sequence of ideal points:
/// d(p(i), p(j)) < 2^-i for i < j, and d(p(i), x) <= 2^-i for the limit x.
template <class Ideal>
class PointDescription {
 public:
  using Fn = std::function<Ideal(unsigned)>;

  PointDescription() = default;
  explicit PointDescription(Fn f) : f_(std::move(f)) {}

  static PointDescription constant(Ideal v) {
    return PointDescription([v = std::move(v)](unsigned) { return v; });
  }

  Ideal operator()(unsigned precision) const { return f_(precision); }
  Ideal at(unsigned precision) const { return f_(precision); }

 private:
  Fn f_;
};

/// An enumeration of rationals used as ideal points of the real line. Stored
/// as a finite prefix of the conceptually infinite enumeration.
class RationalEnumeration {
 public:
  explicit RationalEnumeration(std::vector<Rational> values) : values_(std::make_shared<std::vector<Rational>>(std::move(values))) {
    std::set<Rational> seen;
    for (const auto& q : *values_) {
      if (!seen.insert(q).second) throw DuplicateElement("rational enumeration repeats " + q.str());
    }
  }

  /// 0, then for n = 1, 2, ...: the positive p/q in lowest terms with
  /// max(p, q) = n in increasing order, each followed by its negation.
  /// Starts 0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 2/3, ...
  static RationalEnumeration diagonal(std::size_t prefix = 4096) {
    return RationalEnumeration(diagonal_values(prefix, std::nullopt));
  }

  /// As diagonal(), but with `first` moved to the front.
  static RationalEnumeration with_first(const Rational& first, std::size_t prefix = 4096) {
    std::vector<Rational> v{first};
    auto rest = diagonal_values(prefix == 0 ? 0 : prefix - 1, first);
    v.insert(v.end(), rest.begin(), rest.end());
    v.resize(std::min(v.size(), prefix));
    return RationalEnumeration(std::move(v));
  }

  /// 1/3 first, then the diagonal enumeration without it.
  static RationalEnumeration third_first(std::size_t prefix = 4096) { return with_first(Rational(1, 3), prefix); }

  std::size_t size() const { return values_->size(); }
  const Rational& at(IdealId id) const {
    if (id.index >= values_->size()) throw std::out_of_range("rational enumeration index out of range");
    return (*values_)[id.index];
  }
  std::optional<IdealId> index_of(const Rational& q) const {
    auto it = std::find(values_->begin(), values_->end(), q);
    if (it == values_->end()) return std::nullopt;
    return IdealId{static_cast<std::uint64_t>(it - values_->begin())};
  }
  const std::vector<Rational>& values() const { return *values_; }

 private:
  static std::vector<Rational> diagonal_values(std::size_t prefix, const std::optional<Rational>& skip) {
    std::vector<Rational> out;
    auto push = [&](Rational q) {
      if (out.size() < prefix && !(skip && *skip == q)) out.push_back(std::move(q));
    };
    push(Rational(0));
    for (long long n = 1; out.size() < prefix; ++n) {
      std::vector<Rational> level;
      for (long long k = 1; k <= n; ++k) {
        if (std::gcd(k, n) != 1) continue;
        level.emplace_back(k, n);  // k/n <= 1
        if (k != n) level.emplace_back(n, k);
      }
      std::sort(level.begin(), level.end());
      for (auto& q : level) {
        push(q);
        push(-q);
      }
    }
    return out;
  }

  std::shared_ptr<const std::vector<Rational>> values_;
};

// ---------------------------------------------------------------------------
// Constructors

/// Discrete space over an injective list of naturals; distances 0 and 1.
inline MetricSpace<std::uint64_t> discrete_space(std::vector<std::uint64_t> enumeration,
                                                 std::string label = "discrete") {
  std::unordered_set<std::uint64_t> seen;
  for (auto v : enumeration) {
    if (!seen.insert(v).second) throw DuplicateElement(label + ": element " + std::to_string(v) + " repeats");
  }
  auto values = std::make_shared<const std::vector<std::uint64_t>>(std::move(enumeration));
  const auto count = static_cast<std::uint64_t>(values->size());
  return MetricSpace<std::uint64_t>(
      std::move(label), count, [values](IdealId id) { return (*values)[id.index]; },
      [](const std::uint64_t& a, const std::uint64_t& b) { return ExtendedReal::finite(a == b ? 0 : 1); },
      SpaceTraits{Rational(1), true});
}

/// The naturals with the discrete metric and identity enumeration; `limit`
/// restricts to [0, limit).
inline MetricSpace<std::uint64_t> discrete_naturals(std::optional<std::uint64_t> limit = std::nullopt) {
  return MetricSpace<std::uint64_t>(
      "naturals", limit, [](IdealId id) { return id.index; },
      [](const std::uint64_t& a, const std::uint64_t& b) { return ExtendedReal::finite(a == b ? 0 : 1); },
      SpaceTraits{Rational(1), true});
}

/// The real line with rational ideal points under the given enumeration.
inline MetricSpace<Rational> real_line(RationalEnumeration enumeration = RationalEnumeration::diagonal()) {
  auto count = static_cast<std::uint64_t>(enumeration.size());
  return MetricSpace<Rational>(
      "reals", count, [enumeration = std::move(enumeration)](IdealId id) { return enumeration.at(id); },
      [](const Rational& a, const Rational& b) { return ExtendedReal::finite((a - b).abs()); });
}

namespace detail {

inline ExtendedReal first_disagreement_distance(const FiniteSequence& a, const FiniteSequence& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t x = k < a.size() ? a[k] : 0;
    std::uint64_t y = k < b.size() ? b[k] : 0;
    if (x != y) return ExtendedReal::finite(pow2(-static_cast<long long>(k)));
  }
  return ExtendedReal::finite(0);
}

}  // namespace detail

/// Baire space; ideal points are finitely supported sequences numbered by
/// finite_support_code. d(s, t) = 2^-k for the first disagreement index k.
inline MetricSpace<FiniteSequence> baire_space() {
  return MetricSpace<FiniteSequence>(
      "baire", std::nullopt, [](IdealId id) { return finite_support_decode(id.index); },
      detail::first_disagreement_distance, SpaceTraits{std::nullopt, true});
}

/// Cantor space; binary finitely supported sequences numbered by their bits.
inline MetricSpace<FiniteSequence> cantor_space() {
  return MetricSpace<FiniteSequence>(
      "cantor", std::nullopt, [](IdealId id) { return binary_support_decode(id.index); },
      detail::first_disagreement_distance, SpaceTraits{std::nullopt, true});
}

/// Product with the max metric. Ideal point i is (s_{pi0(i)}, t_{pi1(i)})
/// under Cantor pairing; when both factors are finite the ids are instead
/// numbered row-major, so they stay dense in [0, |A| |B|).
template <class A, class B>
MetricSpace<std::pair<A, B>> product_space(const MetricSpace<A>& a, const MetricSpace<B>& b) {
  std::optional<std::uint64_t> count;
  std::function<std::pair<std::uint64_t, std::uint64_t>(std::uint64_t)> split;
  if (a.ideal_count() && b.ideal_count()) {
    const std::uint64_t nb = *b.ideal_count();
    count = *a.ideal_count() * nb;
    split = [nb](std::uint64_t i) { return std::pair{i / nb, i % nb}; };
  } else {
    split = [](std::uint64_t i) { return unpair(i); };
  }
  SpaceTraits traits;
  if (a.traits().separation && b.traits().separation) {
    traits.separation = min(*a.traits().separation, *b.traits().separation);
  }
  traits.ultrametric = a.traits().ultrametric && b.traits().ultrametric;
  return MetricSpace<std::pair<A, B>>(
      a.label() + " x " + b.label(), count,
      [a, b, split](IdealId id) {
        auto [i, j] = split(id.index);
        return std::pair<A, B>{a.ideal(IdealId{i}), b.ideal(IdealId{j})};
      },
      [a, b](const std::pair<A, B>& x, const std::pair<A, B>& y) {
        return max(a.distance(x.first, y.first), b.distance(x.second, y.second));
      },
      traits);
}

/// Finite sequences; equal lengths use the max metric, unequal lengths are at
/// distance infinity. Ideal ids: bijective base-|A| words for finite A, list
/// codes of ideal ids otherwise.
template <class A>
MetricSpace<std::vector<A>> finseq_space(const MetricSpace<A>& a) {
  std::function<std::vector<std::uint64_t>(std::uint64_t)> decode;
  if (auto n = a.ideal_count()) {
    if (*n == 0) {
      decode = [](std::uint64_t i) {
        if (i != 0) throw std::out_of_range("finite sequences over an empty space");
        return std::vector<std::uint64_t>{};
      };
    } else {
      decode = [n = *n](std::uint64_t i) { return word_decode(i, n); };
    }
  } else {
    decode = list_decode;
  }
  std::optional<std::uint64_t> count;
  if (a.ideal_count() && *a.ideal_count() == 0) count = 1;
  return MetricSpace<std::vector<A>>(
      a.label() + "^<w", count,
      [a, decode](IdealId id) {
        std::vector<A> out;
        for (auto k : decode(id.index)) out.push_back(a.ideal(IdealId{k}));
        return out;
      },
      [a](const std::vector<A>& x, const std::vector<A>& y) {
        if (x.size() != y.size()) return ExtendedReal::infinity();
        ExtendedReal d = ExtendedReal::finite(0);
        for (std::size_t k = 0; k < x.size(); ++k) d = max(d, a.distance(x[k], y[k]));
        return d;
      },
      a.traits());
}

// ---------------------------------------------------------------------------
// Point descriptions

/// Approximants below precision 128 are computed once and shared by copies.
inline PointDescription<Rational> real_point(RealStream x) {
  struct Memo {
    std::mutex lock;
    std::vector<std::optional<Rational>> values = std::vector<std::optional<Rational>>(128);
  };
  auto memo = std::make_shared<Memo>();
  return PointDescription<Rational>([x = std::move(x), memo](unsigned i) {
    if (i >= memo->values.size()) return x.approximant(i);
    std::lock_guard<std::mutex> g(memo->lock);
    auto& slot = memo->values[i];
    if (!slot) slot = x.approximant(i);
    return *slot;
  });
}

/// A Baire (or Cantor) point from its coordinate function; entry i is the
/// prefix of length i + 1, which is within 2^-(i+1) of the point.
inline PointDescription<FiniteSequence> sequence_point(std::function<std::uint64_t(std::size_t)> coords) {
  return PointDescription<FiniteSequence>([coords = std::move(coords)](unsigned i) {
    FiniteSequence prefix(static_cast<std::size_t>(i) + 1);
    for (std::size_t k = 0; k <= i; ++k) prefix[k] = coords(k);
    return strip_trailing_zeros(std::move(prefix));
  });
}

/// Upper bound of an extended distance at the given evaluation depth;
/// nullopt when it presents infinity so far.
inline std::optional<Rational> distance_upper_bound(const ExtendedReal& d, unsigned depth) {
  if (d.is_exact_infinity()) return std::nullopt;
  if (d.exact_value()) return *d.exact_value();
  auto c = d.classify(depth);
  if (std::holds_alternative<ExtendedReal::InfiniteSoFar>(c)) return std::nullopt;
  return std::get<ExtendedReal::FiniteSoFar>(c).interval.hi;
}

/// Checks d(p(i), p(j)) < 2^-i for i < j at the given evaluation depth.
template <class Ideal>
bool rapid_cauchy_at(const MetricSpace<Ideal>& space, const PointDescription<Ideal>& p, unsigned i,
                     unsigned j, unsigned depth = 48) {
  if (!(i < j)) throw std::invalid_argument("rapid_cauchy_at needs i < j");
  auto hi = distance_upper_bound(space.distance(p(i), p(j)), depth);
  return hi && *hi < pow2(-static_cast<long long>(i));
}

/// Interval of width <= 2^-(precision-2) containing d(p, q), or nullopt when
/// the distance presents infinity at the evaluation depth.
template <class Ideal>
std::optional<DyadicInterval> point_distance(const MetricSpace<Ideal>& space, const PointDescription<Ideal>& p,
                                             const PointDescription<Ideal>& q, unsigned precision) {
  const unsigned k = precision + 1;
  const Rational step = pow2(-static_cast<long long>(k));
  ExtendedReal d = space.distance(p(k), q(k));
  if (d.is_exact_infinity()) return std::nullopt;

  Rational center;
  Rational radius;
  if (d.exact_value()) {
    center = *d.exact_value();
  } else {
    auto c = d.classify(k);
    if (std::holds_alternative<ExtendedReal::InfiniteSoFar>(c)) return std::nullopt;
    const auto& iv = std::get<ExtendedReal::FiniteSoFar>(c).interval;
    center = (iv.lo + iv.hi) / Rational(2);
    radius = step;
  }

  // Each description sits within 2^-k of its limit. In a space whose ideal
  // points are separated by at least 2^-k the sequences are already constant.
  const auto& sep = space.traits().separation;
  const bool pinned = sep && step <= *sep;
  if (!pinned) {
    if (space.traits().ultrametric && d.exact_value() && center > step) {
      // Ultrametric: a distance above both approximation radii is exact.
    } else {
      radius += step * Rational(2);
    }
  }
  Rational lo = center - radius;
  if (lo < Rational(0)) lo = Rational(0);
  return DyadicInterval(lo, center + radius);
}

}  // namespace cpac
