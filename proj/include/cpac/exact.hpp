// SPDX-License-Identifier: Apache-2.0
//
// Exact rational arithmetic, rational intervals and rapidly converging
// Cauchy streams. Nothing in this header rounds.

#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cpac/error.hpp"

namespace cpac {

using BigInt = boost::multiprecision::cpp_int;

/// Floor of the square root of a nonnegative integer, by Newton iteration.
inline BigInt isqrt(const BigInt& n) {
  if (n < 0) throw std::domain_error("isqrt of a negative integer");
  if (n < 2) return n;
  // Start above the root; the iteration decreases monotonically to it.
  BigInt x = BigInt(1) << ((boost::multiprecision::msb(n) / 2) + 1);
  while (true) {
    BigInt y = (x + n / x) >> 1;
    if (y >= x) return x;
    x = std::move(y);
  }
}

/// Exact rational number kept in canonical form: den > 0, gcd(|num|, den) = 1.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  explicit Rational(BigInt n) : num_(std::move(n)), den_(1) {}
  Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ < 0 ? -1 : (num_ > 0 ? 1 : 0); }

  Rational operator-() const { return raw(-num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return Rational(a.num_ + b.num_, a.den_);
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return Rational(a.num_ - b.num_, a.den_);
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    BigInt lhs = a.num_ * b.den_;
    BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// Largest integer not above this value.
  BigInt floor() const {
    BigInt q = num_ / den_;  // truncates toward zero
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  /// Serialized as "p/q", always with an explicit denominator.
  std::string str() const { return num_.str() + "/" + den_.str(); }

  /// Parses the strict "p/q" form (optional leading minus, q > 0).
  static Rational parse(std::string_view text) {
    static const std::regex form(R"(^(-?[0-9]+)/([0-9]+)$)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(text.begin(), text.end(), m, form)) {
      throw ConfigError("rational must be written as p/q: '" + std::string(text) + "'");
    }
    BigInt d(m[2].str());
    if (d == 0) throw ConfigError("rational with zero denominator: '" + std::string(text) + "'");
    return Rational(BigInt(m[1].str()), std::move(d));
  }

  /// Approximation for display only; never used on an exact path.
  double to_double() const {
    return static_cast<double>(boost::multiprecision::cpp_bin_float_50(num_) /
                               boost::multiprecision::cpp_bin_float_50(den_));
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& q) { return os << q.str(); }

 private:
  static Rational raw(BigInt n, BigInt d) {
    Rational r;
    r.num_ = std::move(n);
    r.den_ = std::move(d);
    return r;
  }

  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    BigInt g = boost::multiprecision::gcd(num_, den_);
    if (g != 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

/// 2^e for any integer exponent.
inline Rational pow2(long long e) {
  if (e >= 0) return Rational(BigInt(1) << static_cast<unsigned>(e));
  return Rational(BigInt(1), BigInt(1) << static_cast<unsigned>(-e));
}

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Closed interval [lo, hi] with rational endpoints.
struct DyadicInterval {
  Rational lo;
  Rational hi;

  DyadicInterval() = default;
  DyadicInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo) throw std::invalid_argument("interval with hi < lo");
  }

  /// The interval of radius r around c.
  static DyadicInterval ball(const Rational& c, const Rational& r) { return {c - r, c + r}; }

  Rational width() const { return hi - lo; }
  bool contains(const Rational& q) const { return lo <= q && q <= hi; }
  bool contains(const DyadicInterval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool intersects(const DyadicInterval& o) const { return !(hi < o.lo || o.hi < lo); }

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// Rapidly converging Cauchy sequence of rationals: |q_i - q_j| < 2^-i for i < j.
/// The described real x satisfies |x - q_i| <= 2^-i.
class RealStream {
 public:
  using Approximant = std::function<Rational(unsigned)>;

  explicit RealStream(Approximant f) : f_(std::move(f)) {}

  Rational approximant(unsigned i) const { return f_(i); }
  DyadicInterval interval(unsigned i) const { return DyadicInterval::ball(f_(i), pow2(-static_cast<long long>(i))); }

 private:
  Approximant f_;
};

inline RealStream real_from_rational(Rational q) {
  return RealStream([q = std::move(q)](unsigned) { return q; });
}

namespace detail {

// floor(sqrt(2) * 2^k), from a table of the first kTableBits bits.
inline BigInt sqrt2_scaled(unsigned k) {
  constexpr unsigned kTableBits = 1024;
  static const BigInt table = isqrt(BigInt(2) << (2 * kTableBits));
  if (k <= kTableBits) return table >> (kTableBits - k);
  return isqrt(BigInt(2) << (2 * k));
}

}  // namespace detail

/// floor(xi * 2^k) / 2^k where xi = sqrt(2) - 1; strictly below xi, within 2^-k.
inline Rational coded_irrational_truncation(unsigned k) {
  BigInt scaled = detail::sqrt2_scaled(k) - (BigInt(1) << k);
  return Rational(std::move(scaled), BigInt(1) << k);
}

/// The real q + xi * 2^-scale_exp with xi = sqrt(2) - 1. It differs from every
/// rational, so strict comparisons against rationals resolve at finite precision.
inline RealStream generic_real(Rational q, unsigned scale_exp) {
  if (scale_exp < 1) throw std::invalid_argument("generic_real needs scale_exp >= 1");
  Rational scale = pow2(-static_cast<long long>(scale_exp));
  return RealStream([q = std::move(q), scale = std::move(scale)](unsigned i) {
    // truncation error < 2^-(i+1) * scale <= 2^-(i+2)
    return q + coded_irrational_truncation(i + 1) * scale;
  });
}

enum class Tri : std::uint8_t { false_, true_, unresolved };

inline const char* to_string(Tri t) {
  switch (t) {
    case Tri::true_: return "true";
    case Tri::false_: return "false";
    default: return "unresolved";
  }
}

/// Default number of refinement steps for every precision loop.
inline constexpr unsigned kDefaultCap = 64;

/// Decides x > q by refining x's interval until q falls outside it.
inline Tri compare_gt(const RealStream& x, const Rational& q, unsigned cap = kDefaultCap) {
  if (cap < 1) throw std::invalid_argument("compare_gt needs cap >= 1");
  for (unsigned i = 0; i <= cap; ++i) {
    DyadicInterval iv = x.interval(i);
    if (iv.lo > q) return Tri::true_;
    if (iv.hi < q) return Tri::false_;
  }
  return Tri::unresolved;
}

/// Presentation of an extended real: either q_i > i for all i (infinity) or
/// the approximants are rapid Cauchy. Constant presentations carry their exact
/// value so consumers can skip refinement.
class ExtendedReal {
 public:
  using Approximant = std::function<Rational(unsigned)>;

  explicit ExtendedReal(Approximant f) : f_(std::move(f)) {}

  static ExtendedReal finite(Rational v) {
    ExtendedReal e([v](unsigned) { return v; });
    e.exact_ = std::move(v);
    return e;
  }
  static ExtendedReal infinity() {
    ExtendedReal e([](unsigned i) { return Rational(static_cast<long long>(i) + 1); });
    e.infinite_ = true;
    return e;
  }

  Rational approximant(unsigned i) const { return f_(i); }

  /// Exact finite value, if the presentation was built from one.
  const std::optional<Rational>& exact_value() const { return exact_; }
  bool is_exact_infinity() const { return infinite_; }

  struct FiniteSoFar {
    DyadicInterval interval;
  };
  struct InfiniteSoFar {};
  using Classification = std::variant<FiniteSoFar, InfiniteSoFar>;

  /// Inspects q_0..q_depth. Infinite-so-far iff q_i > i on the whole prefix;
  /// otherwise the rapid Cauchy condition must hold on the prefix.
  Classification classify(unsigned depth) const {
    if (depth < 1) throw std::invalid_argument("classify needs depth >= 1");
    std::vector<Rational> q;
    q.reserve(depth + 1);
    bool above = true;
    for (unsigned i = 0; i <= depth; ++i) {
      q.push_back(f_(i));
      if (!(q.back() > Rational(static_cast<long long>(i)))) above = false;
    }
    if (above) return InfiniteSoFar{};
    for (unsigned i = 0; i < depth; ++i) {
      Rational radius = pow2(-static_cast<long long>(i));
      for (unsigned j = i + 1; j <= depth; ++j) {
        if (!((q[i] - q[j]).abs() < radius)) {
          throw InvalidPresentation("extended real is neither infinite nor rapid Cauchy at (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      }
    }
    return FiniteSoFar{DyadicInterval::ball(q[depth], pow2(-static_cast<long long>(depth)))};
  }

  /// Pointwise maximum; stays a valid presentation in every case.
  friend ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    if (a.exact_ && b.exact_) return finite(cpac::max(*a.exact_, *b.exact_));
    return ExtendedReal([a, b](unsigned i) { return cpac::max(a.approximant(i), b.approximant(i)); });
  }

 private:
  Approximant f_;
  std::optional<Rational> exact_;
  bool infinite_ = false;
};

using ExtendedRealClassification = ExtendedReal::Classification;

/// Free-function form of ExtendedReal::classify.
inline ExtendedRealClassification extended_real_classify(const ExtendedReal& e, unsigned depth) {
  return e.classify(depth);
}

}  // namespace cpac
