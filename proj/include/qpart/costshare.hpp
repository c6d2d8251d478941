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

// Cost shares for a partition of S into cities S_1, ..., S_q.
//
// A price vector p is in the core when sum_{j in T} p_j <= c(U_T) for every
// coalition T and the grand total equals c(S); in the gamma-core the total
// only has to reach gamma * c(S). Both are read off the price LP. The
// greedy allocator builds prices combinatorially for subadditive costs and
// recovers at least c(S) / H_{q-1}.

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "qpart/bits.hpp"
#include "qpart/classify.hpp"
#include "qpart/rational.hpp"
#include "qpart/setfn.hpp"

namespace qpart {

struct PriceVector {
  std::vector<Rational> prices;
  bool feasible = false;
  Rational total;
  Rational lp_value;  // optimum of the price LP (LP-based variants only)
  Rational deficit;   // target total minus lp_value when infeasible, else 0
};

inline Rational sum_prices(const std::vector<Rational>& p, Mask t) {
  Rational s = 0;
  for (Mask r = t; r != 0; r &= r - 1) s += p[lowest_item(r)];
  return s;
}

// True iff sum_{j in T} p_j <= c(U_T) for every nonempty T, excluding T = [k]
// when include_grand is false.
inline bool coalition_constraints_hold(const Valuation& c, const Partition& part,
                                       const std::vector<Rational>& p, bool include_grand = true) {
  const auto u = union_values(c, part);
  const Mask all = full_mask(part.k());
  for (Mask t = 1; t <= all; ++t) {
    if (t == all && !include_grand) continue;
    if (sum_prices(p, t) > u[t]) return false;
  }
  return true;
}

inline PriceVector citycore_prices(const Valuation& c, const Partition& part) {
  if (!is_monotone_normalized(c)) {
    throw std::invalid_argument("citycore_prices: cost function must be monotone and normalized");
  }
  const auto dual = cover_lp_dual(c, part);
  const Rational& target = c(part.subset);
  PriceVector out;
  out.lp_value = dual.value;
  out.prices = dual.prices;
  if (dual.value >= target) {
    if (dual.value > target) {
      const Rational scale = target / dual.value;
      for (auto& x : out.prices) x *= scale;
    }
    out.feasible = true;
    out.total = target;
  } else {
    out.feasible = false;
    out.total = dual.value;
    out.deficit = target - dual.value;
  }
  return out;
}

inline PriceVector gamma_citycore_prices(const Valuation& c, const Partition& part,
                                         const Rational& gamma) {
  if (gamma <= 0 || gamma > 1) throw std::invalid_argument("gamma must be in (0, 1]");
  if (!is_monotone_normalized(c)) {
    throw std::invalid_argument("gamma_citycore_prices: cost function must be monotone and normalized");
  }
  const auto dual = cover_lp_dual(c, part);
  const Rational target = gamma * c(part.subset);
  PriceVector out;
  out.lp_value = dual.value;
  out.prices = dual.prices;
  out.total = dual.value;
  out.feasible = dual.value >= target;
  if (!out.feasible) out.deficit = target - dual.value;
  return out;
}

struct GreedyStep {
  Mask chosen = 0;     // A, as block indices
  Mask newly = 0;      // A \ C, the indices priced in this step
  Rational ratio;      // c(U_A) / |A \ C|
  Rational price;      // assigned to each j in A \ C
};

// Repeatedly picks A minimizing c(U_A) / |A \ C| over A with A \ C nonempty
// (ties: smaller |A \ C|, then smaller mask), prices the new indices at
// ratio / H_{q-1}, and finally scales everything by min(1, c(S) / total).
inline PriceVector greedy_prices(const Valuation& g, const Partition& part,
                                 std::vector<GreedyStep>* trace = nullptr) {
  const auto axioms = check_axioms(g);
  if (!axioms.normalized || !axioms.monotone || !axioms.subadditive) {
    throw std::invalid_argument("greedy_prices: g must be monotone, normalized and subadditive");
  }
  const int q = part.k();
  if (q < 2) throw std::invalid_argument("greedy_prices: need at least two cities");
  require_partition_of(g, part);
  const auto u = union_values(g, part);
  const Rational h = harmonic(q - 1);
  const Mask all = full_mask(q);

  std::vector<Rational> p(q);
  Mask covered = 0;
  while (covered != all) {
    Mask best = 0;
    int best_new = 0;
    Rational best_ratio;
    for (Mask a = 1; a <= all; ++a) {
      const int fresh = popcount(a & ~covered);
      if (fresh == 0) continue;
      const Rational ratio = u[a] / fresh;
      if (best == 0 || ratio < best_ratio || (ratio == best_ratio && fresh < best_new)) {
        best = a;
        best_new = fresh;
        best_ratio = ratio;
      }
    }
    const Mask fresh = best & ~covered;
    const Rational price = best_ratio / h;
    for (int j : items_of(fresh)) p[j] = price;
    if (trace) trace->push_back({best, fresh, best_ratio, price});
    covered |= best;
  }

  PriceVector out;
  out.total = 0;
  for (const auto& x : p) out.total += x;
  const Rational& cap = g(part.subset);
  if (out.total > cap) {
    const Rational scale = cap / out.total;
    for (auto& x : p) x *= scale;
    out.total = cap;
  }
  out.prices = std::move(p);
  out.feasible = coalition_constraints_hold(g, part, out.prices);
  return out;
}

}  // namespace qpart
