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

// Max-of-positive-hypergraph (MPH-k) representations.
//
// A PH-k clause puts nonnegative weight w(E) on hyperedges |E| <= k and
// evaluates to sum_{E subset of T} w(E); an MPH-k function is the pointwise
// max of such clauses. Every q-partitioning valuation is MPH-ceil(m/q): for
// each S, split S into at most q near-equal blocks and put the optimal price
// of block i on hyperedge S_i.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qpart/bits.hpp"
#include "qpart/classify.hpp"
#include "qpart/rational.hpp"
#include "qpart/setfn.hpp"

namespace qpart {

struct PHClause {
  int k = 1;
  std::map<Mask, Rational> weights;  // hyperedge -> weight
};

struct MPHRepresentation {
  int m = 0;
  int k = 1;
  std::vector<PHClause> clauses;
};

inline Rational eval_clause(const PHClause& c, Mask t) {
  Rational total = 0;
  for (const auto& [e, w] : c.weights) {
    if (is_subset(e, t)) total += w;
  }
  return total;
}

inline Rational eval_mph(const MPHRepresentation& rep, Mask t) {
  Rational best = 0;
  for (const auto& c : rep.clauses) {
    Rational x = eval_clause(c, t);
    if (x > best) best = std::move(x);
  }
  return best;
}

inline int max_hyperedge_size(const MPHRepresentation& rep) {
  int k = 0;
  for (const auto& c : rep.clauses) {
    for (const auto& [e, w] : c.weights) k = std::max(k, popcount(e));
  }
  return k;
}

// Structural validity: weights nonnegative and every hyperedge within k items.
inline bool is_well_formed(const MPHRepresentation& rep) {
  for (const auto& c : rep.clauses) {
    if (c.k != rep.k) return false;
    for (const auto& [e, w] : c.weights) {
      if (w < 0 || e == 0 || popcount(e) > rep.k || e > full_mask(rep.m)) return false;
    }
  }
  return true;
}

struct MPHCheck {
  bool ok = true;
  std::optional<Mask> counterexample;
  Rational represented;  // eval_mph at the counterexample
  Rational expected;     // v at the counterexample
};

// eval_mph(rep, T) == v(T) for every T; the first mismatch in mask order otherwise.
inline MPHCheck verify_mph(const MPHRepresentation& rep, const Valuation& v) {
  MPHCheck out;
  if (rep.m != v.m()) throw std::invalid_argument("verify_mph: ground set sizes differ");
  for (Mask t = 0; t < v.size(); ++t) {
    Rational x = eval_mph(rep, t);
    if (x != v(t)) {
      out.ok = false;
      out.counterexample = t;
      out.represented = std::move(x);
      out.expected = v(t);
      return out;
    }
  }
  return out;
}

// Items of s in ascending order dealt round-robin into min(q, |s|) blocks.
inline Partition round_robin_partition(Mask s, int q) {
  const auto items = items_of(s);
  const int k = std::min<int>(q, static_cast<int>(items.size()));
  std::vector<Mask> blocks(k, 0);
  for (std::size_t i = 0; i < items.size(); ++i) blocks[i % k] |= Mask{1} << items[i];
  return make_partition(std::move(blocks));
}

struct MPHWitnessResult {
  std::optional<MPHRepresentation> representation;
  std::optional<ClassificationWitness> rejection;  // set when v is not q-partitioning
};

inline MPHWitnessResult mph_witness(const Valuation& v, int q, const ClassifyOptions& opts = {}) {
  MPHWitnessResult out;
  auto membership = is_q_partitioning(v, q, opts);
  if (!membership.holds) {
    out.rejection = std::move(membership.witness);
    return out;
  }
  const int m = v.m();
  MPHRepresentation rep;
  rep.m = m;
  rep.k = (m + q - 1) / q;
  for (Mask s = 1; s < v.size(); ++s) {
    const Partition part = round_robin_partition(s, q);
    const auto dual = cover_lp_dual(v, part);
    if (dual.value != v(s)) throw std::logic_error("mph_witness: price LP below v(S) for a member");
    PHClause clause;
    clause.k = rep.k;
    for (int i = 0; i < part.k(); ++i) {
      if (dual.prices[i] != 0) clause.weights[part.blocks[i]] = dual.prices[i];
    }
    rep.clauses.push_back(std::move(clause));
  }
  out.representation = std::move(rep);
  return out;
}

// Explicit MPH-k form of gen_binomial_floor(m, k): one clause with weight 1
// on every k-subset (value C(|T|, k)), plus floor clauses putting C(m, k)/2
// on one hyperedge inside each nonempty S (its k lowest items, or S itself
// when |S| < k), deduplicated.
inline MPHRepresentation binomial_floor_representation(int m, int k) {
  if (m < 1 || m > kMaxStoredItems || k < 1 || k > m) {
    throw std::invalid_argument("binomial_floor_representation: need 1 <= k <= m <= 20");
  }
  MPHRepresentation rep;
  rep.m = m;
  rep.k = k;
  PHClause counting;
  counting.k = k;
  const Mask n = Mask{1} << m;
  for (Mask e = 1; e < n; ++e) {
    if (popcount(e) == k) counting.weights[e] = 1;
  }
  rep.clauses.push_back(std::move(counting));

  const Rational floor_value = Rational(binomial(m, k)) / 2;
  std::map<Mask, bool> used;
  for (Mask s = 1; s < n; ++s) {
    Mask e = 0;
    int taken = 0;
    for (Mask r = s; r != 0 && taken < k; r &= r - 1, ++taken) e |= r & (~r + 1);
    if (used[e]) continue;
    used[e] = true;
    PHClause floor_clause;
    floor_clause.k = k;
    floor_clause.weights[e] = floor_value;
    rep.clauses.push_back(std::move(floor_clause));
  }
  return rep;
}

}  // namespace qpart
