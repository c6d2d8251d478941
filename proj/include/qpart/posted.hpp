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

// Posted prices: the capped-distribution quantities
//
//   f(p) = max_{lambda in D(p)} E_{S~lambda} v(S)
//   g(p) = max_{lambda in D(p)} min_{mu in D(p)} E v(S \ T)
//
// where D(p) holds distributions over subsets with every item marginal at
// most p, and a simulator for sequential posted-price sales.

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpart/bits.hpp"
#include "qpart/classify.hpp"
#include "qpart/lpsolve.hpp"
#include "qpart/rational.hpp"
#include "qpart/setfn.hpp"

namespace qpart {

inline constexpr int kMaxMinimaxItems = 4;

template <class T>
struct CappedDistribution {
  int m = 0;
  T cap{};
  std::vector<T> lambda;  // indexed by mask
};

// Simplex and cap constraints, exact for Rational and within 1e-9 for double.
template <class T>
bool in_capped_simplex(const CappedDistribution<T>& d) {
  using Ops = ScalarOps<T>;
  if (d.lambda.size() != (std::size_t{1} << d.m)) return false;
  T total(0);
  for (const auto& x : d.lambda) {
    if (Ops::sign(x) < 0) return false;
    total += x;
  }
  if (Ops::sign(total - T(1)) != 0) return false;
  for (int i = 0; i < d.m; ++i) {
    T marginal(0);
    for (Mask s = 0; s < d.lambda.size(); ++s) {
      if (s >> i & 1) marginal += d.lambda[s];
    }
    if (Ops::sign(marginal - d.cap) > 0) return false;
  }
  return true;
}

template <class T>
struct FValue {
  T value{};
  CappedDistribution<T> argmax;
};

namespace internal {

inline void require_minimax_size(const Valuation& v, const char* who) {
  if (v.m() > kMaxMinimaxItems) throw std::length_error(std::string(who) + ": needs m <= 4");
}

template <class T>
void require_cap(const T& p, const char* who) {
  if (p < T(0) || p > T(1)) throw std::invalid_argument(std::string(who) + ": cap must lie in [0, 1]");
}

// Rows sum(lambda) = 1 and sum_{S contains i} lambda_S <= p over the first
// 2^m columns of an n-column program.
template <class T>
void add_capped_simplex_rows(LinearProgram<T>& lp, int m, const T& p) {
  const std::size_t size = std::size_t{1} << m;
  std::vector<T> ones(lp.n_vars, T(0));
  for (std::size_t s = 0; s < size; ++s) ones[s] = T(1);
  lp.add(std::move(ones), Relation::kEqual, T(1));
  for (int i = 0; i < m; ++i) {
    std::vector<T> row(lp.n_vars, T(0));
    for (std::size_t s = 0; s < size; ++s) {
      if (s >> i & 1) row[s] = T(1);
    }
    lp.add(std::move(row), Relation::kLessEqual, p);
  }
}

}  // namespace internal

template <class T>
FValue<T> f_value(const Valuation& v, const T& p) {
  internal::require_minimax_size(v, "f_value");
  internal::require_cap(p, "f_value");
  const int m = v.m();
  const int n = 1 << m;
  LinearProgram<T> lp(n, Sense::kMaximize);
  for (int s = 0; s < n; ++s) lp.objective[s] = from_rational<T>(v(s));
  internal::add_capped_simplex_rows(lp, m, p);
  auto res = solve(lp);
  if (res.status != LPStatus::kOptimal) throw std::logic_error("f_value: LP not optimal");
  FValue<T> out;
  out.value = res.value;
  out.argmax.m = m;
  out.argmax.cap = p;
  out.argmax.lambda = std::move(res.solution);
  return out;
}

// The inner minimization over mu is replaced by its dual
//   max z - p sum_i y_i  s.t.  z - sum_{i in T} y_i <= sum_S lambda_S v(S \ T) for all T,
// with y >= 0 and z free, and merged with the outer maximization over lambda.
// Columns: lambda (2^m), y (m), z.
template <class T>
T g_value(const Valuation& v, const T& p) {
  internal::require_minimax_size(v, "g_value");
  internal::require_cap(p, "g_value");
  const int m = v.m();
  const int n = 1 << m;
  const int z = n + m;
  LinearProgram<T> lp(n + m + 1, Sense::kMaximize);
  for (int i = 0; i < m; ++i) lp.objective[n + i] = -p;
  lp.objective[z] = T(1);
  lp.set_free(z);
  for (Mask t = 0; t < static_cast<Mask>(n); ++t) {
    std::vector<T> row(lp.n_vars, T(0));
    for (Mask s = 0; s < static_cast<Mask>(n); ++s) row[s] = -from_rational<T>(v(s & ~t));
    for (int i = 0; i < m; ++i) {
      if (t >> i & 1) row[n + i] = T(-1);
    }
    row[z] = T(1);
    lp.add(std::move(row), Relation::kLessEqual, T(0));
  }
  internal::add_capped_simplex_rows(lp, m, p);
  const auto res = solve(lp);
  if (res.status != LPStatus::kOptimal) throw std::logic_error("g_value: LP not optimal");
  return res.value;
}

struct MinimaxStep {
  double p = 0;
  double g = 0;
  double f = 0;
  double f_shrunk = 0;  // f(p^{r/2})
  bool holds = false;   // g >= (f - f_shrunk) / 8
};

struct MinimaxReport {
  int q = 0;
  int r = 0;
  MinimaxStep step;
  std::vector<MinimaxStep> chain;  // caps 16^{-(r/2)^i}, i = 0..s-1
  double chain_g_sum = 0;
  double chain_bound = 0;  // (1/16 - 1/m) v([m]) / 8
  bool chain_holds = false;
  bool ok = false;
};

inline constexpr double kMinimaxTolerance = 1e-9;

namespace internal {

inline MinimaxStep minimax_step(const Valuation& v, double p, int r) {
  MinimaxStep st;
  st.p = p;
  st.g = g_value(v, p);
  st.f = f_value(v, p).value;
  st.f_shrunk = f_value(v, std::pow(p, r / 2.0)).value;
  st.holds = st.g >= (st.f - st.f_shrunk) / 8 - kMinimaxTolerance;
  return st;
}

}  // namespace internal

// Checks g(p) >= (f(p) - f(p^{r/2}))/8 for r = log2 q, and the telescoped
// sum over caps 16^{-(r/2)^i} against (1/16 - 1/m) v([m])/8. The chain length
// is ceil(log_{r/2} log_16 m^2), at least 1; for r <= 2 it is 1.
inline MinimaxReport verify_minimax_step(const Valuation& v, double p, int q) {
  internal::require_minimax_size(v, "verify_minimax_step");
  if (q < 2 || (q & (q - 1)) != 0) throw std::invalid_argument("verify_minimax_step: q must be a power of 2");
  if (!(p >= 0) || p > 1.0 / 16) throw std::invalid_argument("verify_minimax_step: need 0 <= p <= 1/16");
  if (!is_q_partitioning(v, q).holds) throw std::invalid_argument("verify_minimax_step: v is not q-partitioning");
  MinimaxReport out;
  out.q = q;
  out.r = 0;
  while ((1 << out.r) < q) ++out.r;
  out.step = internal::minimax_step(v, p, out.r);

  const int m = v.m();
  const double half_r = out.r / 2.0;
  int length = 1;
  const double log16_m2 = 2.0 * std::log(static_cast<double>(m)) / std::log(16.0);
  if (half_r > 1 && log16_m2 > 1) {
    length = std::max(1, static_cast<int>(std::ceil(std::log(log16_m2) / std::log(half_r))));
  }
  for (int i = 0; i < length; ++i) {
    const double cap = std::pow(16.0, -std::pow(half_r, i));
    out.chain.push_back(internal::minimax_step(v, cap, out.r));
    out.chain_g_sum += out.chain.back().g;
  }
  out.chain_bound = (1.0 / 16 - 1.0 / m) * to_double(v(full_mask(m))) / 8;
  out.chain_holds = out.chain_g_sum >= out.chain_bound - kMinimaxTolerance;
  out.ok = out.step.holds && out.chain_holds;
  for (const auto& st : out.chain) out.ok = out.ok && st.holds;
  return out;
}

// ---------------------------------------------------------------------------
// Sequential posted prices.

struct MarketInstance {
  std::vector<Valuation> buyers;
  std::vector<Rational> prices;  // per item
  std::vector<int> order;        // permutation of buyer indices
};

struct MechanismOutcome {
  std::vector<Mask> allocation;  // per buyer
  std::vector<Rational> utilities;
  Rational welfare;
  Rational revenue;
};

inline Rational bundle_price(const std::vector<Rational>& prices, Mask s) {
  Rational total = 0;
  for (Mask r = s; r != 0; r &= r - 1) total += prices[lowest_item(r)];
  return total;
}

// Utility-maximizing bundle within `available`; ties go to the smaller
// bundle, then the smaller mask.
inline Mask demand(const Valuation& v, const std::vector<Rational>& prices, Mask available) {
  Mask best = 0;
  Rational best_u = 0;
  for_each_submask(available, [&](Mask s) {
    const Rational u = v(s) - bundle_price(prices, s);
    if (u > best_u || (u == best_u && (popcount(s) < popcount(best) ||
                                       (popcount(s) == popcount(best) && s < best)))) {
      best = s;
      best_u = u;
    }
  });
  return best;
}

namespace internal {

inline void require_market(const std::vector<Valuation>& buyers, const std::vector<Rational>& prices) {
  if (buyers.empty()) throw std::invalid_argument("market: no buyers");
  const int m = buyers.front().m();
  for (const auto& b : buyers) {
    if (b.m() != m) throw std::invalid_argument("market: buyers disagree on the item count");
  }
  if (static_cast<int>(prices.size()) != m) throw std::invalid_argument("market: need one price per item");
  for (const auto& p : prices) {
    if (p < 0) throw std::invalid_argument("market: negative price");
  }
}

}  // namespace internal

inline MechanismOutcome simulate_mechanism(const MarketInstance& inst) {
  internal::require_market(inst.buyers, inst.prices);
  const int n = static_cast<int>(inst.buyers.size());
  std::vector<int> seen(n, 0);
  if (static_cast<int>(inst.order.size()) != n) throw std::invalid_argument("market: order must list every buyer");
  for (int b : inst.order) {
    if (b < 0 || b >= n || seen[b]++) throw std::invalid_argument("market: order is not a permutation");
  }
  MechanismOutcome out;
  out.allocation.assign(n, 0);
  out.utilities.assign(n, Rational(0));
  Mask available = full_mask(inst.buyers.front().m());
  for (int b : inst.order) {
    const Mask s = demand(inst.buyers[b], inst.prices, available);
    const Rational pay = bundle_price(inst.prices, s);
    out.allocation[b] = s;
    out.utilities[b] = inst.buyers[b](s) - pay;
    out.welfare += inst.buyers[b](s);
    out.revenue += pay;
    available &= ~s;
  }
  return out;
}

struct WelfareResult {
  std::vector<Mask> allocation;  // per buyer
  Rational value;
};

// max sum_i v_i(S_i) over disjoint S_1..S_n, by subset DP over buyers.
inline WelfareResult brute_opt_welfare(const std::vector<Valuation>& buyers) {
  if (buyers.empty()) throw std::invalid_argument("brute_opt_welfare: no buyers");
  const int m = buyers.front().m();
  if (m > kMaxAxiomItems) throw std::length_error("brute_opt_welfare: needs m <= 12");
  for (const auto& b : buyers) {
    if (b.m() != m) throw std::invalid_argument("brute_opt_welfare: buyers disagree on the item count");
  }
  const std::size_t n = buyers.size();
  const std::size_t size = std::size_t{1} << m;
  // best[i][S]: optimum for buyers 0..i-1 using items within S.
  std::vector<std::vector<Rational>> best(n + 1, std::vector<Rational>(size));
  std::vector<std::vector<Mask>> choice(n + 1, std::vector<Mask>(size, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (Mask s = 0; s < size; ++s) {
      best[i][s] = best[i - 1][s];
      for_each_submask(s, [&](Mask t) {
        const Rational x = buyers[i - 1](t) + best[i - 1][s & ~t];
        if (x > best[i][s]) {
          best[i][s] = x;
          choice[i][s] = t;
        }
      });
    }
  }
  WelfareResult out;
  out.value = best[n][size - 1];
  out.allocation.assign(n, 0);
  Mask left = static_cast<Mask>(size - 1);
  for (std::size_t i = n; i >= 1; --i) {
    out.allocation[i - 1] = choice[i][left];
    left &= ~choice[i][left];
  }
  return out;
}

struct OrderWelfare {
  std::vector<int> order;
  Rational welfare;
};

inline constexpr int kMaxOrderBuyers = 6;

// Minimum welfare over all arrival orders. The remaining outcome depends
// only on (buyers still to arrive, items still available), so it is
// memoized on that pair; ties keep the smallest next buyer index.
inline OrderWelfare worst_order_welfare(const std::vector<Valuation>& buyers, const std::vector<Rational>& prices) {
  internal::require_market(buyers, prices);
  const int n = static_cast<int>(buyers.size());
  if (n > kMaxOrderBuyers) throw std::length_error("worst_order_welfare: needs n <= 6");
  const int m = buyers.front().m();
  std::vector<std::vector<Mask>> demands(n, std::vector<Mask>(std::size_t{1} << m));
  for (int b = 0; b < n; ++b) {
    for (Mask a = 0; a < demands[b].size(); ++a) demands[b][a] = demand(buyers[b], prices, a);
  }
  std::map<std::pair<Mask, Mask>, std::pair<Rational, int>> memo;
  std::function<Rational(Mask, Mask)> solve_state = [&](Mask left, Mask available) -> Rational {
    if (left == 0) return 0;
    const auto key = std::make_pair(left, available);
    if (auto it = memo.find(key); it != memo.end()) return it->second.first;
    Rational best;
    int best_b = -1;
    for (Mask r = left; r != 0; r &= r - 1) {
      const int b = lowest_item(r);
      const Mask s = demands[b][available];
      Rational x = buyers[b](s) + solve_state(left & ~(Mask{1} << b), available & ~s);
      if (best_b < 0 || x < best) {
        best = std::move(x);
        best_b = b;
      }
    }
    memo[key] = {best, best_b};
    return best;
  };
  OrderWelfare out;
  Mask left = full_mask(n);
  Mask available = full_mask(m);
  out.welfare = solve_state(left, available);
  while (left != 0) {
    const int b = memo.at({left, available}).second;
    out.order.push_back(b);
    available &= ~demands[b][available];
    left &= ~(Mask{1} << b);
  }
  return out;
}

}  // namespace qpart
