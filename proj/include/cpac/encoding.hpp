// SPDX-License-Identifier: Apache-2.0
//
// Canonical bijections with the naturals, shared by every module that has to
// agree on ideal-point numbering:
//
//   pairing      N x N <-> N         Cantor: pair(a, b) = (a+b)(a+b+1)/2 + b
//   list code    N^{<w} <-> N        n = sum_j 2^{p_j}, p_j = sum_{t<=j} (a_t + 1) - 1
//                                    (the empty list is 0; bit positions of n
//                                    record the running sums)
//   finite-support sequences <-> N   strip trailing zeros; empty -> 0; otherwise
//                                    the list code of the stripped sequence with
//                                    its last (nonzero) entry decremented
//   binary finite-support <-> N      sum_k s_k 2^k
//   words over [n] <-> N             bijective base-n numeration
//
// The list code overflows 64 bits once the entries of a list sum past ~63;
// every uint64 routine here throws std::overflow_error rather than wrap.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cpac/exact.hpp"

namespace cpac {

/// A finitely supported sequence of naturals, kept without trailing zeros.
using FiniteSequence = std::vector<std::uint64_t>;

using Natural = BigInt;

namespace detail {

inline std::uint64_t isqrt64(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (static_cast<unsigned __int128>(r) * r > n) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace detail

/// Cantor pairing on 64-bit naturals.
inline std::uint64_t pair(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 s = static_cast<unsigned __int128>(a) + b;
  unsigned __int128 v = s * (s + 1) / 2 + b;
  if (v > UINT64_MAX) throw std::overflow_error("pairing overflow");
  return static_cast<std::uint64_t>(v);
}

inline std::pair<std::uint64_t, std::uint64_t> unpair(std::uint64_t t) {
  // w = floor((sqrt(8t + 1) - 1) / 2), computed without overflowing 8t + 1.
  unsigned __int128 n = static_cast<unsigned __int128>(t) * 8 + 1;
  std::uint64_t root;
  if (n <= UINT64_MAX) {
    root = detail::isqrt64(static_cast<std::uint64_t>(n));
  } else {
    root = static_cast<std::uint64_t>(isqrt(BigInt(t) * 8 + 1));
  }
  std::uint64_t w = (root - 1) / 2;
  std::uint64_t tri = static_cast<std::uint64_t>(static_cast<unsigned __int128>(w) * (w + 1) / 2);
  std::uint64_t b = t - tri;
  return {w - b, b};
}

/// Cantor pairing on arbitrary-size naturals.
inline Natural pair(const Natural& a, const Natural& b) {
  Natural s = a + b;
  return s * (s + 1) / 2 + b;
}

inline std::pair<Natural, Natural> unpair(const Natural& t) {
  Natural w = (isqrt(t * 8 + 1) - 1) / 2;
  Natural b = t - w * (w + 1) / 2;
  return {w - b, b};
}

/// Z <-> N: 0, -1, 1, -2, 2, ...
inline Natural zigzag(const BigInt& z) { return z >= 0 ? Natural(z * 2) : Natural(-z * 2 - 1); }
inline BigInt unzigzag(const Natural& n) {
  return (n % 2 == 0) ? BigInt(n / 2) : BigInt(-(n + 1) / 2);
}

inline std::uint64_t list_code(const std::vector<std::uint64_t>& xs) {
  std::uint64_t code = 0;
  std::uint64_t pos = 0;  // running sum of (a_t + 1)
  for (std::uint64_t a : xs) {
    if (a >= 64 || pos + a + 1 > 64) throw std::overflow_error("list code overflow");
    pos += a + 1;
    code |= std::uint64_t{1} << (pos - 1);
  }
  return code;
}

inline std::vector<std::uint64_t> list_decode(std::uint64_t code) {
  std::vector<std::uint64_t> xs;
  std::uint64_t prev = 0;  // previous bit position + 1
  while (code != 0) {
    auto p = static_cast<std::uint64_t>(std::countr_zero(code));
    xs.push_back(p - prev);
    prev = p + 1;
    code &= code - 1;
  }
  return xs;
}

/// Drops trailing zeros, the canonical form of a finitely supported sequence.
inline std::vector<std::uint64_t> strip_trailing_zeros(std::vector<std::uint64_t> s) {
  while (!s.empty() && s.back() == 0) s.pop_back();
  return s;
}

inline std::uint64_t finite_support_code(const std::vector<std::uint64_t>& seq) {
  std::vector<std::uint64_t> s = strip_trailing_zeros(seq);
  if (s.empty()) return 0;
  s.back() -= 1;
  return list_code(s);
}

inline std::vector<std::uint64_t> finite_support_decode(std::uint64_t code) {
  std::vector<std::uint64_t> s = list_decode(code);
  if (!s.empty()) s.back() += 1;
  return s;
}

inline std::uint64_t binary_support_code(const std::vector<std::uint64_t>& seq) {
  std::vector<std::uint64_t> s = strip_trailing_zeros(seq);
  if (s.size() > 64) throw std::overflow_error("binary code overflow");
  std::uint64_t code = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] > 1) throw std::invalid_argument("binary sequence entry > 1");
    code |= s[k] << k;
  }
  return code;
}

inline std::vector<std::uint64_t> binary_support_decode(std::uint64_t code) {
  std::vector<std::uint64_t> s;
  while (code != 0) {
    s.push_back(code & 1U);
    code >>= 1;
  }
  return s;
}

/// Bijective base-n numeration of words over the alphabet [n], n >= 1.
inline std::uint64_t word_code(const std::vector<std::uint64_t>& word, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("empty alphabet");
  unsigned __int128 code = 0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it >= n) throw std::invalid_argument("letter outside alphabet");
    code = code * n + (*it + 1);
    if (code > UINT64_MAX) throw std::overflow_error("word code overflow");
  }
  return static_cast<std::uint64_t>(code);
}

inline std::vector<std::uint64_t> word_decode(std::uint64_t code, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("empty alphabet");
  std::vector<std::uint64_t> word;
  while (code != 0) {
    std::uint64_t r = (code - 1) % n;
    word.push_back(r);
    code = (code - 1) / n;
  }
  return word;
}

}  // namespace cpac
