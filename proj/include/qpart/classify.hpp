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

// Membership in the q-partitioning classes, the partition level and
// gamma-closeness, all decided with exact cover LPs.
//
// For a partition (S_1, ..., S_k) of S the cover LP is
//
//   min  sum_T alpha(T) v(U_T)   s.t.  sum_{T : j in T} alpha(T) >= 1,  alpha >= 0,
//
// over nonempty T subset of [k], with U_T the union of the blocks in T. Its dual
// asks for prices p_j >= 0 with sum_{j in T} p_j <= v(U_T). Taking T = [k]
// shows the value never exceeds v(S); v is q-partitioning iff it equals v(S)
// for every S and every partition into at most q parts.
//
// A violating cover for a partition induces one of equal value on any
// refinement, so the checks below only visit partitions with exactly
// min(q, |S|) nonempty blocks.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qpart/bits.hpp"
#include "qpart/lpsolve.hpp"
#include "qpart/rational.hpp"
#include "qpart/setfn.hpp"

namespace qpart {

inline constexpr int kMaxClassifyItems = 8;

struct Partition {
  Mask subset = 0;
  std::vector<Mask> blocks;

  int k() const { return static_cast<int>(blocks.size()); }

  // Union of the blocks indexed by t (bit j <=> block j).
  Mask union_of(Mask t) const {
    Mask u = 0;
    for (Mask r = t; r != 0; r &= r - 1) u |= blocks[lowest_item(r)];
    return u;
  }
};

// Builds a partition from disjoint nonempty blocks.
inline Partition make_partition(std::vector<Mask> blocks) {
  Partition p;
  for (Mask b : blocks) {
    if (b == 0) throw std::invalid_argument("partition block is empty");
    if (p.subset & b) throw std::invalid_argument("partition blocks overlap");
    p.subset |= b;
  }
  p.blocks = std::move(blocks);
  return p;
}

struct CoverWeight {
  Mask t;  // subset of block indices
  Rational alpha;
};
using FractionalCover = std::vector<CoverWeight>;

inline bool is_fractional_cover(const FractionalCover& cover, int k) {
  std::vector<Rational> covered(k);
  for (const auto& w : cover) {
    if (w.alpha < 0 || w.t == 0 || w.t > full_mask(k)) return false;
    for (int j : items_of(w.t)) covered[j] += w.alpha;
  }
  return std::all_of(covered.begin(), covered.end(), [](const Rational& c) { return c >= 1; });
}

inline Rational cover_value(const Valuation& v, const Partition& part,
                            const FractionalCover& cover) {
  Rational total = 0;
  for (const auto& w : cover) total += w.alpha * v(part.union_of(w.t));
  return total;
}

// u[t] = v(U_t) for every t subset of [k].
inline std::vector<Rational> union_values(const Valuation& v, const Partition& part) {
  const Mask n = Mask{1} << part.k();
  std::vector<Rational> u(n);
  std::vector<Mask> unions(n, 0);
  for (Mask t = 1; t < n; ++t) {
    unions[t] = unions[t & (t - 1)] | part.blocks[lowest_item(t)];
    u[t] = v(unions[t]);
  }
  return u;
}

struct PrimalCover {
  Rational value;
  FractionalCover cover;
};

struct DualPrices {
  Rational value;
  std::vector<Rational> prices;
};

inline LinearProgram<Rational> cover_primal_program(const std::vector<Rational>& u, int k) {
  const int n = (1 << k) - 1;
  LinearProgram<Rational> lp(n, Sense::kMinimize);
  for (int t = 1; t <= n; ++t) lp.objective[t - 1] = u[t];
  for (int j = 0; j < k; ++j) {
    std::vector<Rational> row(n);
    for (int t = 1; t <= n; ++t) {
      if (t & (1 << j)) row[t - 1] = 1;
    }
    lp.add(std::move(row), Relation::kGreaterEqual, Rational(1));
  }
  return lp;
}

inline LinearProgram<Rational> cover_dual_program(const std::vector<Rational>& u, int k) {
  const int n = (1 << k) - 1;
  LinearProgram<Rational> lp(k, Sense::kMaximize);
  std::fill(lp.objective.begin(), lp.objective.end(), Rational(1));
  for (int t = 1; t <= n; ++t) {
    std::vector<Rational> row(k);
    for (int j = 0; j < k; ++j) {
      if (t & (1 << j)) row[j] = 1;
    }
    lp.add(std::move(row), Relation::kLessEqual, u[t]);
  }
  return lp;
}

inline void require_partition_of(const Valuation& v, const Partition& part) {
  if (part.k() < 1 || part.k() > v.m()) throw std::invalid_argument("partition has bad block count");
  if (part.subset > v.ground()) throw std::invalid_argument("partition exceeds ground set");
}

// Minimum-cost fractional cover (the primal LP).
inline PrimalCover cover_lp_primal(const Valuation& v, const Partition& part) {
  require_partition_of(v, part);
  const auto u = union_values(v, part);
  const auto res = solve(cover_primal_program(u, part.k()));
  if (res.status != LPStatus::kOptimal) throw std::logic_error("cover LP not optimal");
  PrimalCover out{res.value, {}};
  for (std::size_t i = 0; i < res.solution.size(); ++i) {
    if (res.solution[i] != 0) out.cover.push_back({static_cast<Mask>(i + 1), res.solution[i]});
  }
  return out;
}

// Maximum total price under all coalition constraints (the dual LP).
inline DualPrices cover_lp_dual(const Valuation& v, const Partition& part) {
  require_partition_of(v, part);
  const auto u = union_values(v, part);
  const auto res = solve(cover_dual_program(u, part.k()));
  if (res.status != LPStatus::kOptimal) throw std::logic_error("price LP not optimal");
  return {res.value, res.solution};
}

// The cover LP optimum together with optimal dual prices.
inline DualPrices cover_lp_value(const Valuation& v, const Partition& part) {
  return cover_lp_dual(v, part);
}

// ---------------------------------------------------------------------------
// Partition enumeration

// Calls f(partition) for every set partition of s with kmin..kmax nonempty
// blocks, in lexicographic restricted-growth-string order over the items of
// s (ascending). f returns false to stop early. Returns false if stopped.
template <class F>
bool for_each_partition(Mask s, int kmin, int kmax, F&& f) {
  const std::vector<int> items = items_of(s);
  const int n = static_cast<int>(items.size());
  kmax = std::min(kmax, n);
  if (n == 0 || kmin > kmax) return true;
  std::vector<int> rgs(n, 0);
  std::vector<int> prefix_max(n, 0);  // max of rgs[0..i]
  Partition part;
  part.subset = s;

  // Extends rgs from position i; the pruning keeps enough room for kmin.
  auto recurse = [&](auto&& self, int i) -> bool {
    const int used = i == 0 ? 0 : prefix_max[i - 1] + 1;
    if (i == n) {
      if (used < kmin) return true;
      part.blocks.assign(used, 0);
      for (int j = 0; j < n; ++j) part.blocks[rgs[j]] |= Mask{1} << items[j];
      return f(static_cast<const Partition&>(part));
    }
    if (used + (n - i) < kmin) return true;
    const int top = std::min(used, kmax - 1);
    for (int b = 0; b <= top; ++b) {
      rgs[i] = b;
      prefix_max[i] = std::max(i == 0 ? 0 : prefix_max[i - 1], b);
      if (!self(self, i + 1)) return false;
    }
    return true;
  };
  return recurse(recurse, 0);
}

// Every partition of s into 2..min(qmax, |s|) nonempty blocks.
inline std::vector<Partition> enumerate_partitions(Mask s, int qmax) {
  if (popcount(s) < 2) throw std::invalid_argument("enumerate_partitions: need |S| >= 2");
  std::vector<Partition> out;
  for_each_partition(s, 2, qmax, [&](const Partition& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Classification

struct ClassificationWitness {
  Mask subset = 0;
  Partition partition;
  FractionalCover cover;
  Rational lhs;  // cover value
  Rational rhs;  // v(S)
};

struct ClassifyOptions {
  int threads = 1;
};

struct Classification {
  bool holds = true;
  std::optional<ClassificationWitness> witness;
};

namespace internal {

inline void require_classifiable(const Valuation& v, int q) {
  if (v.m() > kMaxClassifyItems) {
    throw std::invalid_argument("classification is capped at m <= 8, got m=" +
                                std::to_string(v.m()));
  }
  if (q < 2) throw std::invalid_argument("q must be at least 2, got " + std::to_string(q));
  if (!is_monotone_normalized(v)) {
    throw std::invalid_argument("valuation must be monotone and normalized");
  }
}

// Runs body(s) for every s in [1, 2^m) on `threads` workers with stride
// assignment. body returns false to request that larger subsets be skipped;
// the smallest such s is returned (or 0). Results are identical for any
// thread count because every subset below the returned one is visited.
template <class Body>
Mask sweep_subsets(int m, int threads, Body&& body) {
  const Mask n = Mask{1} << m;
  std::atomic<Mask> stop{n};
  auto worker = [&](Mask start, Mask stride) {
    for (Mask s = start; s < n; s += stride) {
      if (s > stop.load(std::memory_order_relaxed)) break;
      if (!body(s)) {
        Mask cur = stop.load();
        while (s < cur && !stop.compare_exchange_weak(cur, s)) {
        }
        break;
      }
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    worker(1, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, Mask(1 + w), Mask(threads));
    for (auto& t : pool) t.join();
  }
  const Mask found = stop.load();
  return found == n ? 0 : found;
}

}  // namespace internal

inline Classification is_q_partitioning(const Valuation& v, int q,
                                        const ClassifyOptions& opts = {}) {
  internal::require_classifiable(v, q);
  const int qq = std::min(q, v.m());  // at most m nonempty blocks exist
  std::vector<std::optional<ClassificationWitness>> found(std::size_t{1} << v.m());
  const Mask bad = internal::sweep_subsets(v.m(), opts.threads, [&](Mask s) {
    const int size = popcount(s);
    if (size < 2 || v(s) == 0) return true;
    const int k = std::min(qq, size);
    bool ok = true;
    for_each_partition(s, k, k, [&](const Partition& part) {
      auto primal = cover_lp_primal(v, part);
      if (primal.value < v(s)) {
        found[s] = ClassificationWitness{s, part, std::move(primal.cover), primal.value, v(s)};
        ok = false;
      }
      return ok;
    });
    return ok;
  });
  Classification out;
  if (bad != 0) {
    out.holds = false;
    out.witness = std::move(found[bad]);
  }
  return out;
}

enum class LevelSearch { kBinary, kLinear };

// Largest q with v in Q(q,[m]); 1 if v is not subadditive. For m = 1 every
// function is in every class and the result is 1.
inline int partition_level(const Valuation& v, LevelSearch mode = LevelSearch::kBinary,
                           const ClassifyOptions& opts = {}) {
  const int m = v.m();
  if (m < 2 || !is_q_partitioning(v, 2, opts).holds) return 1;
  if (mode == LevelSearch::kLinear) {
    int level = 2;
    while (level < m && is_q_partitioning(v, level + 1, opts).holds) ++level;
    return level;
  }
  int lo = 2;  // holds
  int hi = m;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (is_q_partitioning(v, mid, opts).holds) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

struct ClosenessResult {
  Rational gamma = 1;
  std::optional<ClassificationWitness> argmin;  // set when gamma < 1
};

// gamma = min over S with v(S) > 0 and partitions into at most q parts of
// (cover LP value) / v(S). Ties keep the smallest S, then the first partition.
inline ClosenessResult closeness(const Valuation& v, int q, const ClassifyOptions& opts = {}) {
  internal::require_classifiable(v, q);
  const int qq = std::min(q, v.m());
  std::vector<std::optional<ClassificationWitness>> best(std::size_t{1} << v.m());
  std::vector<Rational> ratio(std::size_t{1} << v.m(), Rational(1));
  internal::sweep_subsets(v.m(), opts.threads, [&](Mask s) {
    const int size = popcount(s);
    if (size < 2 || v(s) == 0) return true;
    const int k = std::min(qq, size);
    for_each_partition(s, k, k, [&](const Partition& part) {
      auto primal = cover_lp_primal(v, part);
      const Rational r = primal.value / v(s);
      if (r < ratio[s]) {
        ratio[s] = r;
        best[s] = ClassificationWitness{s, part, std::move(primal.cover), primal.value, v(s)};
      }
      return true;
    });
    return true;
  });
  ClosenessResult out;
  for (std::size_t s = 1; s < ratio.size(); ++s) {
    if (ratio[s] < out.gamma) {
      out.gamma = ratio[s];
      out.argmin = std::move(best[s]);
    }
  }
  return out;
}

// Re-checks a violation witness from scratch: valid partition of S, valid
// fractional cover, recomputed lhs equal to the stored one and below v(S).
inline bool verify_witness(const Valuation& v, const ClassificationWitness& w) {
  if (w.subset > v.ground() || w.partition.subset != w.subset) return false;
  Mask seen = 0;
  for (Mask b : w.partition.blocks) {
    if (b == 0 || (seen & b)) return false;
    seen |= b;
  }
  if (seen != w.subset) return false;
  if (!is_fractional_cover(w.cover, w.partition.k())) return false;
  const Rational lhs = cover_value(v, w.partition, w.cover);
  return lhs == w.lhs && w.rhs == v(w.subset) && lhs < w.rhs;
}

// ---------------------------------------------------------------------------
// Audits

struct SmoothnessEntry {
  std::size_t index = 0;
  bool in_lower_class = false;  // v in Q(q,[m])
  Rational gamma;               // closeness of v to Q(q+1,[m])
  bool bound_holds = false;
};

struct SmoothnessReport {
  int m = 0;
  int q = 0;
  Rational bound;      // (q-1)/q
  Rational min_gamma;  // over instances that meet the precondition
  std::vector<SmoothnessEntry> entries;
  bool ok = true;
};

// Every v in Q(q,[m]) is (q-1)/q-close to Q(q+1,[m]). Instances outside
// Q(q,[m]) are flagged and excluded from min_gamma.
inline SmoothnessReport audit_smoothness(int m, int q, const std::vector<Valuation>& instances,
                                         const ClassifyOptions& opts = {}) {
  if (q < 2 || q + 1 > m) throw std::invalid_argument("audit_smoothness: need 2 <= q < m");
  SmoothnessReport rep;
  rep.m = m;
  rep.q = q;
  rep.bound = frac(q - 1, q);
  rep.min_gamma = 1;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Valuation& v = instances[i];
    if (v.m() != m) throw std::invalid_argument("audit_smoothness: instance has wrong m");
    SmoothnessEntry e;
    e.index = i;
    e.in_lower_class = is_q_partitioning(v, q, opts).holds;
    if (e.in_lower_class) {
      e.gamma = closeness(v, q + 1, opts).gamma;
      e.bound_holds = e.gamma >= rep.bound;
      rep.min_gamma = std::min(rep.min_gamma, e.gamma);
    }
    rep.ok = rep.ok && e.in_lower_class && e.bound_holds;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

struct SubadditiveClosenessReport {
  int q = 0;
  Rational gamma;
  Rational bound;  // 1 / H_{q-1}
  bool holds = false;
};

inline SubadditiveClosenessReport audit_closeness_to_subadditive(const Valuation& g, int q,
                                                                 const ClassifyOptions& opts = {}) {
  if (!is_q_partitioning(g, 2, opts).holds) {
    throw std::invalid_argument("audit_closeness_to_subadditive: g is not subadditive");
  }
  SubadditiveClosenessReport rep;
  rep.q = q;
  rep.gamma = closeness(g, q, opts).gamma;
  rep.bound = 1 / harmonic(q - 1);
  rep.holds = rep.gamma >= rep.bound;
  return rep;
}

}  // namespace qpart
