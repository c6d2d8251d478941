// Copyright 2026 The qpart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact rational scalars (GMP) and the conversions every module shares.

#pragma once

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qpart {

using Rational = mpq_class;

// n/d in canonical form. mpq_class(n, d) does not reduce, and GMP
// arithmetic on unreduced operands is undefined.
inline Rational frac(long n, long d) {
  if (d == 0) throw std::invalid_argument("zero denominator");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

// Parses "p/q" or "p" (optional leading '-', decimal digits only).
// Throws std::invalid_argument on malformed text or a zero denominator.
inline Rational parse_rational(std::string_view text) {
  auto valid_integer = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_integer(num) || !valid_integer(den)) {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  }
  auto strip_plus = [](std::string_view s) {
    return std::string(!s.empty() && s.front() == '+' ? s.substr(1) : s);
  };
  mpz_class n(strip_plus(num), 10);
  mpz_class d(strip_plus(den), 10);
  if (d == 0) {
    throw std::invalid_argument("zero denominator in rational '" + std::string(text) + "'");
  }
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

// H_a = 1 + 1/2 + ... + 1/a; H_0 = 0.
inline Rational harmonic(int a) {
  Rational h = 0;
  for (int i = 1; i <= a; ++i) h += frac(1, i);
  return h;
}

inline mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

// Scalar conversion used by the templated LP code paths.
template <class T>
T from_rational(const Rational& r);

template <>
inline Rational from_rational<Rational>(const Rational& r) {
  return r;
}

template <>
inline double from_rational<double>(const Rational& r) {
  return r.get_d();
}

}  // namespace qpart
