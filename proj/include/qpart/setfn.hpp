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

// Explicit set functions over [m], their axiom checks and the instance
// generators used throughout the library.
//
// A Valuation stores one exact rational per subset, indexed by bitmask
// (bit i set <=> item i+1 in S). Construction only enforces shape and
// nonnegativity; normalization and monotonicity are reported by
// check_axioms() and required as preconditions by the algorithms.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qpart/bits.hpp"
#include "qpart/random.hpp"
#include "qpart/rational.hpp"

namespace qpart {

// Size caps. Storage is a 2^m table; exhaustive checks are O(3^m).
inline constexpr int kMaxStoredItems = 20;
inline constexpr int kMaxAxiomItems = 12;

class Valuation {
 public:
  Valuation(int m, std::vector<Rational> values) : m_(m), values_(std::move(values)) {
    if (m < 1 || m > kMaxStoredItems) {
      throw std::invalid_argument("m must be in [1, 20], got " + std::to_string(m));
    }
    if (values_.size() != (std::size_t{1} << m)) {
      throw std::invalid_argument("expected 2^" + std::to_string(m) + " values, got " +
                                  std::to_string(values_.size()));
    }
    for (std::size_t s = 0; s < values_.size(); ++s) {
      if (values_[s] < 0) {
        throw std::invalid_argument("negative value at mask " + std::to_string(s));
      }
    }
  }

  int m() const { return m_; }
  Mask ground() const { return full_mask(m_); }
  std::size_t size() const { return values_.size(); }
  const std::vector<Rational>& values() const { return values_; }

  // Unchecked lookup for hot loops.
  const Rational& operator()(Mask s) const { return values_[s]; }

  const Rational& at(Mask s) const {
    if (s >= values_.size()) {
      throw std::out_of_range("mask " + std::to_string(s) + " out of range for m=" +
                              std::to_string(m_));
    }
    return values_[s];
  }

  Valuation scaled(const Rational& c) const {
    std::vector<Rational> out(values_.size());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = values_[s] * c;
    return Valuation(m_, std::move(out));
  }

  friend bool operator==(const Valuation& a, const Valuation& b) {
    return a.m_ == b.m_ && a.values_ == b.values_;
  }

 private:
  int m_;
  std::vector<Rational> values_;
};

inline const Rational& eval(const Valuation& v, Mask s) { return v.at(s); }

// ---------------------------------------------------------------------------
// Axioms

enum class Axiom { kNormalized, kMonotone, kSubadditive, kLipschitz };

inline const char* axiom_name(Axiom a) {
  switch (a) {
    case Axiom::kNormalized: return "normalized";
    case Axiom::kMonotone: return "monotone";
    case Axiom::kSubadditive: return "subadditive";
    case Axiom::kLipschitz: return "lipschitz";
  }
  return "?";
}

// Monotone/subadditive witnesses use (first, second) = (S, T);
// a Lipschitz witness is (S, item) with item 0-based.
struct AxiomViolation {
  Axiom axiom;
  Mask first = 0;
  Mask second = 0;
  int item = -1;
};

struct AxiomReport {
  bool normalized = true;
  bool monotone = true;
  bool subadditive = true;
  bool lipschitz = true;
  std::vector<AxiomViolation> violations;  // at most one per failed axiom

  std::optional<AxiomViolation> counterexample(Axiom a) const {
    for (const auto& v : violations) {
      if (v.axiom == a) return v;
    }
    return std::nullopt;
  }
};

inline bool is_monotone(const Valuation& v) {
  const Mask n = static_cast<Mask>(v.size());
  for (Mask s = 0; s < n; ++s) {
    for (int i = 0; i < v.m(); ++i) {
      const Mask t = s | (Mask{1} << i);
      if (t != s && v(s) > v(t)) return false;
    }
  }
  return true;
}

inline bool is_monotone_normalized(const Valuation& v) { return v(0) == 0 && is_monotone(v); }

inline AxiomReport check_axioms(const Valuation& v) {
  if (v.m() > kMaxAxiomItems) {
    throw std::invalid_argument("check_axioms: m=" + std::to_string(v.m()) +
                                " exceeds exhaustive cap 12");
  }
  AxiomReport rep;
  const int m = v.m();
  const Mask n = static_cast<Mask>(v.size());

  if (v(0) != 0) {
    rep.normalized = false;
    rep.violations.push_back({Axiom::kNormalized, 0, 0, -1});
  }

  for (Mask s = 0; s < n && (rep.monotone || rep.lipschitz); ++s) {
    for (int i = 0; i < m; ++i) {
      const Mask bit = Mask{1} << i;
      if (s & bit) continue;
      const Rational gain = v(s | bit) - v(s);
      if (gain < 0 && rep.monotone) {
        rep.monotone = false;
        rep.violations.push_back({Axiom::kMonotone, s, s | bit, -1});
      }
      if ((gain < 0 || gain > 1) && rep.lipschitz) {
        rep.lipschitz = false;
        rep.violations.push_back({Axiom::kLipschitz, s, 0, i});
      }
    }
  }

  // For monotone v it suffices to test disjoint pairs: v(S u T) = v(S u (T\S)).
  if (rep.monotone) {
    for (Mask u = 1; u < n && rep.subadditive; ++u) {
      for (Mask s = (u - 1) & u; s != 0; s = (s - 1) & u) {
        const Mask t = u & ~s;
        if (s < t) continue;  // unordered pairs
        if (v(u) > v(s) + v(t)) {
          rep.subadditive = false;
          rep.violations.push_back({Axiom::kSubadditive, s, t, -1});
          break;
        }
      }
    }
  } else {
    for (Mask s = 0; s < n && rep.subadditive; ++s) {
      for (Mask t = s; t < n; ++t) {
        if (v(s | t) > v(s) + v(t)) {
          rep.subadditive = false;
          rep.violations.push_back({Axiom::kSubadditive, s, t, -1});
          break;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Closure

// Largest subadditive function below v:
//   v*(S) = min(v(S), min_{0 != T proper subset of S} v*(T) + v*(S \ T)).
inline Valuation subadditive_closure(const Valuation& v) {
  if (!is_monotone_normalized(v)) {
    throw std::invalid_argument("subadditive_closure: valuation must be monotone and normalized");
  }
  if (v.m() > kMaxAxiomItems) {
    throw std::invalid_argument("subadditive_closure: m exceeds cap 12");
  }
  std::vector<Rational> out = v.values();
  const Mask n = static_cast<Mask>(v.size());
  Rational candidate;
  for (Mask s = 1; s < n; ++s) {
    const Mask low = s & (~s + 1);
    // Splits with the lowest item on the T side enumerate each unordered pair once.
    for (Mask t = (s - 1) & s; t != 0; t = (t - 1) & s) {
      if (!(t & low)) continue;
      candidate = out[t] + out[s & ~t];
      if (candidate < out[s]) out[s] = candidate;
    }
  }
  return Valuation(v.m(), std::move(out));
}

// ---------------------------------------------------------------------------
// Generators

// v(0) = 0, v(S) = 1 for 0 < |S| < m, v([m]) = top. With top = q/(q-1)
// this valuation is q-partitioning but not (q+1)-partitioning.
inline Valuation gen_threshold(int m, const Rational& top) {
  if (m < 2 || m > kMaxStoredItems) {
    throw std::invalid_argument("gen_threshold: m must be in [2, 20]");
  }
  if (top < 1 || top > 2) {
    throw std::invalid_argument("gen_threshold: top must be in [1, 2]");
  }
  std::vector<Rational> values(std::size_t{1} << m, Rational(1));
  values[0] = 0;
  values[full_mask(m)] = top;
  return Valuation(m, std::move(values));
}

// Minimum set cover over the nonzero vectors of F_2^a, with covering sets
// S_v = {u : <v,u> = 1 mod 2}. Item j stands for the vector j+1.
inline Valuation gen_setcover_f2(int a) {
  if (a < 2 || a > 4) throw std::invalid_argument("gen_setcover_f2: a must be in [2, 4]");
  const int m = (1 << a) - 1;
  const Mask n = Mask{1} << m;
  std::vector<Mask> sets;
  for (int vec = 1; vec <= m; ++vec) {
    Mask s = 0;
    for (int j = 0; j < m; ++j) {
      if (std::popcount(static_cast<unsigned>(vec & (j + 1))) % 2 == 1) s |= Mask{1} << j;
    }
    sets.push_back(s);
  }
  // Fewest sets whose union is exactly U (BFS), then take the minimum over supersets.
  constexpr int kUnreached = std::numeric_limits<int>::max();
  std::vector<int> dist(n, kUnreached);
  dist[0] = 0;
  std::vector<Mask> frontier{0};
  while (!frontier.empty()) {
    std::vector<Mask> next;
    for (Mask u : frontier) {
      for (Mask s : sets) {
        const Mask w = u | s;
        if (dist[w] == kUnreached) {
          dist[w] = dist[u] + 1;
          next.push_back(w);
        }
      }
    }
    frontier = std::move(next);
  }
  for (int i = 0; i < m; ++i) {
    const Mask bit = Mask{1} << i;
    for (Mask u = n; u-- > 0;) {
      if (!(u & bit)) dist[u] = std::min(dist[u], dist[u | bit]);
    }
  }
  std::vector<Rational> values(n);
  for (Mask u = 0; u < n; ++u) values[u] = dist[u];
  return Valuation(m, std::move(values));
}

// v(S) = max over clauses c of sum_{i in S} c_i.
inline Valuation gen_xos(int m, const std::vector<std::vector<Rational>>& clauses) {
  if (m < 1 || m > kMaxStoredItems) throw std::invalid_argument("gen_xos: m must be in [1, 20]");
  for (const auto& c : clauses) {
    if (static_cast<int>(c.size()) != m) {
      throw std::invalid_argument("gen_xos: clause length must equal m");
    }
    for (const auto& w : c) {
      if (w < 0) throw std::invalid_argument("gen_xos: clause weights must be nonnegative");
    }
  }
  const Mask n = Mask{1} << m;
  std::vector<Rational> values(n);
  std::vector<Rational> sums(n);
  for (const auto& c : clauses) {
    for (Mask s = 1; s < n; ++s) {
      sums[s] = sums[s & (s - 1)] + c[lowest_item(s)];
      if (sums[s] > values[s]) values[s] = sums[s];
    }
  }
  return Valuation(m, std::move(values));
}

// v(S) = max(C(|S|, k), C(m, k) / 2) for S nonempty, v(0) = 0.
inline Valuation gen_binomial_floor(int m, int k) {
  if (m < 1 || m > kMaxStoredItems || k < 1 || k > m) {
    throw std::invalid_argument("gen_binomial_floor: need 1 <= k <= m <= 20");
  }
  const Rational floor_value = Rational(binomial(m, k)) / 2;
  std::vector<Rational> by_size(m + 1);
  for (int size = 1; size <= m; ++size) {
    const Rational count(binomial(size, k));
    by_size[size] = count > floor_value ? count : floor_value;
  }
  std::vector<Rational> values(std::size_t{1} << m);
  for (Mask s = 1; s < values.size(); ++s) values[s] = by_size[popcount(s)];
  return Valuation(m, std::move(values));
}

// Raw random monotone normalized function: max of 1..3 random additive
// clauses (weights in {0, 1/4, ..., 1}) plus per-set noise in {0, 1/8, ..., 1/2},
// repaired upward into a monotone function.
inline Valuation gen_random_monotone(int m, std::uint64_t seed) {
  if (m < 1 || m > kMaxAxiomItems) {
    throw std::invalid_argument("gen_random_monotone: m must be in [1, 12]");
  }
  CounterRng rng(seed, /*stream=*/0x5e7f);
  const int r = rng.between(1, 3);
  std::vector<std::vector<Rational>> clauses(r, std::vector<Rational>(m));
  for (auto& c : clauses) {
    for (auto& w : c) w = frac(rng.between(0, 4), 4);
  }
  const Valuation base = gen_xos(m, clauses);
  std::vector<Rational> values = base.values();
  for (Mask s = 1; s < values.size(); ++s) values[s] += frac(rng.between(0, 4), 8);
  for (Mask s = 1; s < values.size(); ++s) {
    for (Mask rest = s; rest != 0; rest &= rest - 1) {
      const Mask below = s & ~(rest & (~rest + 1));
      if (values[below] > values[s]) values[s] = values[below];
    }
  }
  return Valuation(m, std::move(values));
}

inline Valuation gen_random_subadditive(int m, std::uint64_t seed) {
  return subadditive_closure(gen_random_monotone(m, seed));
}

// ---------------------------------------------------------------------------
// Generator specs (the {"generator": {...}} input form)

struct ThresholdSpec {
  int m;
  Rational top;
};
struct SetCoverF2Spec {
  int a;
};
struct XosClausesSpec {
  int m;
  std::vector<std::vector<Rational>> clauses;
};
struct BinomialFloorSpec {
  int m;
  int k;
};
struct RandomSubadditiveSpec {
  int m;
  std::uint64_t seed;
};

using GeneratorSpec =
    std::variant<ThresholdSpec, SetCoverF2Spec, XosClausesSpec, BinomialFloorSpec,
                 RandomSubadditiveSpec>;

inline Valuation generate(const GeneratorSpec& spec) {
  struct Visitor {
    Valuation operator()(const ThresholdSpec& s) const { return gen_threshold(s.m, s.top); }
    Valuation operator()(const SetCoverF2Spec& s) const { return gen_setcover_f2(s.a); }
    Valuation operator()(const XosClausesSpec& s) const { return gen_xos(s.m, s.clauses); }
    Valuation operator()(const BinomialFloorSpec& s) const {
      return gen_binomial_floor(s.m, s.k);
    }
    Valuation operator()(const RandomSubadditiveSpec& s) const {
      return gen_random_subadditive(s.m, s.seed);
    }
  };
  return std::visit(Visitor{}, spec);
}

}  // namespace qpart
