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

// Concentration tools: root solvers for the isoperimetric bases, the f^s
// distance and an exhaustive isoperimetric checker, tail-bound evaluators,
// a self-bounding checker and a Monte Carlo sampler for v(S) with S drawn
// item by item.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qpart/bits.hpp"
#include "qpart/random.hpp"
#include "qpart/rational.hpp"
#include "qpart/setfn.hpp"

namespace qpart {

struct RootParams {
  double alpha = 1;
  int q = 2;
  int s = 1;
};

inline constexpr double kRootTolerance = 1e-12;
inline constexpr int kRootMaxIterations = 200;

namespace internal {

// Bisection for a continuous g with g(lo) < 0 < g(hi).
template <typename F>
double bisect(F g, double lo, double hi) {
  for (int it = 0; it < kRootMaxIterations && hi - lo > kRootTolerance; ++it) {
    const double mid = lo + (hi - lo) / 2;
    if (g(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

inline void require_params(const RootParams& p, const char* who) {
  if (!(p.alpha > 0) || !std::isfinite(p.alpha)) throw std::invalid_argument(std::string(who) + ": alpha must be > 0");
  if (p.q < 2) throw std::invalid_argument(std::string(who) + ": q must be >= 2");
  if (p.s < 1 || p.s >= p.q) throw std::invalid_argument(std::string(who) + ": need 1 <= s < q");
}

}  // namespace internal

// Larger root of t + a t^{-1/b} = a + 1 for a > b > 0. The left side is
// convex with its minimum at t0 = (a/b)^{b/(b+1)} > 1 and equals a + 1 at
// t = 1, so the other root lies in (t0, a + 1].
inline double larger_root(double a, double b) {
  if (!(a > b) || !(b > 0)) throw std::invalid_argument("larger_root: need a > b > 0");
  const double t0 = std::pow(a / b, b / (b + 1));
  auto g = [a, b](double t) { return t + a * std::pow(t, -1 / b) - (a + 1); };
  return internal::bisect(g, t0, a + 1);
}

inline double solve_t(const RootParams& p) {
  internal::require_params(p, "solve_t");
  if (p.alpha * p.s < 1 - 1e-12) throw std::domain_error("solve_t: requires alpha >= 1/s");
  return larger_root(p.alpha * p.q, p.alpha * p.s);
}

// Candidate t_r for r = 0..s-1; solve_t_min is their minimum.
inline std::vector<double> t_min_candidates(const RootParams& p) {
  internal::require_params(p, "solve_t_min");
  std::vector<double> out;
  for (int r = 0; r < p.s; ++r) out.push_back(larger_root(p.alpha * (p.q - r), p.alpha * (p.s - r)));
  return out;
}

inline double solve_t_min(const RootParams& p) {
  const auto c = t_min_candidates(p);
  return *std::min_element(c.begin(), c.end());
}

// Positive root of e^{tau/2} + e^{-tau} = 2.
inline double solve_tau() {
  return internal::bisect([](double t) { return std::exp(t / 2) + std::exp(-t) - 2; }, 0.5, 2.0);
}

// Larger root of xi + psi xi^{-(1+delta)/psi} = psi + 1.
inline double solve_xi(double psi, double delta) {
  if (!(delta > 0) || psi < 1 + delta) throw std::domain_error("solve_xi: need psi >= 1 + delta > 1");
  if (psi == 1 + delta) return psi;
  return larger_root(psi, psi / (1 + delta));
}

// Larger root of z + q alpha z^{-1/alpha} = 1 + q alpha.
inline double solve_z(int q, double alpha) {
  if (q < 2 || !(alpha > 0)) throw std::invalid_argument("solve_z: need q >= 2, alpha > 0");
  return larger_root(q * alpha, alpha);
}

// ---------------------------------------------------------------------------
// Finite product spaces and f^s.

using Point = std::vector<int>;

struct ProductSpace {
  std::vector<std::vector<double>> probs;  // per coordinate, per outcome

  int dims() const { return static_cast<int>(probs.size()); }

  std::size_t num_points() const {
    std::size_t n = 1;
    for (const auto& p : probs) n *= p.size();
    return n;
  }

  // Mixed-radix decoding, coordinate 0 least significant.
  Point point(std::size_t index) const {
    Point x(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
      x[i] = static_cast<int>(index % probs[i].size());
      index /= probs[i].size();
    }
    return x;
  }

  double prob(const Point& x) const {
    double p = 1;
    for (std::size_t i = 0; i < probs.size(); ++i) p *= probs[i][x[i]];
    return p;
  }

  bool contains(const Point& x) const {
    if (x.size() != probs.size()) return false;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (x[i] < 0 || x[i] >= static_cast<int>(probs[i].size())) return false;
    }
    return true;
  }
};

inline constexpr int kMaxSpaceDims = 6;
inline constexpr int kMaxSpaceOutcomes = 4;
inline constexpr double kMaxTupleBudget = 1e6;

inline void validate_space(const ProductSpace& sp) {
  if (sp.dims() < 1 || sp.dims() > kMaxSpaceDims) throw std::invalid_argument("product space: need 1..6 coordinates");
  for (const auto& p : sp.probs) {
    if (p.empty() || p.size() > static_cast<std::size_t>(kMaxSpaceOutcomes)) {
      throw std::invalid_argument("product space: need 1..4 outcomes per coordinate");
    }
    double sum = 0;
    for (double x : p) {
      if (!(x >= 0)) throw std::invalid_argument("product space: negative probability");
      sum += x;
    }
    if (std::abs(sum - 1) > 1e-9) throw std::invalid_argument("product space: probabilities must sum to 1");
  }
}

inline double set_probability(const ProductSpace& sp, const std::vector<Point>& a) {
  double p = 0;
  for (const auto& x : a) p += sp.prob(x);
  return p;
}

// Number of coordinates i where x_i occurs fewer than s times among y^1_i..y^q_i.
inline int fs_points(const std::vector<Point>& ys, const Point& x, int s) {
  int count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    int hits = 0;
    for (const auto& y : ys) {
      if (y.at(i) == x[i]) ++hits;
    }
    if (hits < s) ++count;
  }
  return count;
}

// Infimum of fs_points over y^i in A_i, by enumerating all tuples.
inline int fs_sets(const std::vector<std::vector<Point>>& as, const Point& x, int s) {
  double budget = 1;
  for (const auto& a : as) {
    if (a.empty()) throw std::invalid_argument("fs_sets: empty set");
    for (const auto& y : a) {
      if (y.size() != x.size()) throw std::invalid_argument("fs_sets: point dimensions differ");
    }
    budget *= static_cast<double>(a.size());
  }
  if (budget > kMaxTupleBudget) throw std::length_error("fs_sets: tuple product exceeds 1e6");
  const std::size_t q = as.size();
  std::vector<std::size_t> idx(q, 0);
  int best = static_cast<int>(x.size());
  for (;;) {
    int count = 0;
    for (std::size_t c = 0; c < x.size() && count < best; ++c) {
      int hits = 0;
      for (std::size_t i = 0; i < q; ++i) {
        if (as[i][idx[i]][c] == x[c]) ++hits;
      }
      if (hits < s) ++count;
    }
    best = std::min(best, count);
    if (best == 0) return 0;
    std::size_t j = 0;
    while (j < q && ++idx[j] == as[j].size()) idx[j++] = 0;
    if (j == q) break;
  }
  return best;
}

enum class IsoVariant {
  kGeneral,  // base t(alpha, q, s), exponent f^s, alpha >= 1/s
  kTMin,     // base t^min(alpha, q, s), exponent f^s, any alpha > 0
  kS1,       // base z(q, alpha), exponent f^1
  kTau,      // base e^{tau/q}, exponent f^{q-1}, alpha fixed to 1/q
};

struct IsoResult {
  double base = 0;
  double lhs = 0;  // integral of base^{f}
  double rhs = 0;  // 1 / prod P[A_i]^alpha
  bool holds = false;
};

inline constexpr double kIsoRelativeSlack = 1e-9;

// Both sides of the isoperimetric inequality by summing over all of Omega.
// For kS1 and kTau the s argument is ignored (fixed to 1 and q - 1).
inline IsoResult verify_isoperimetric(const ProductSpace& sp, const std::vector<std::vector<Point>>& as,
                                      double alpha, int s, IsoVariant variant = IsoVariant::kGeneral) {
  validate_space(sp);
  const int q = static_cast<int>(as.size());
  if (q < 2) throw std::invalid_argument("verify_isoperimetric: need q >= 2 sets");
  for (const auto& a : as) {
    for (const auto& y : a) {
      if (!sp.contains(y)) throw std::invalid_argument("verify_isoperimetric: point outside the space");
    }
  }
  IsoResult out;
  int exponent_s = s;
  switch (variant) {
    case IsoVariant::kGeneral:
      out.base = solve_t({alpha, q, s});
      break;
    case IsoVariant::kTMin:
      out.base = solve_t_min({alpha, q, s});
      break;
    case IsoVariant::kS1:
      exponent_s = 1;
      out.base = solve_z(q, alpha);
      break;
    case IsoVariant::kTau:
      exponent_s = q - 1;
      alpha = 1.0 / q;
      out.base = std::exp(solve_tau() / q);
      break;
  }
  out.rhs = 1;
  for (const auto& a : as) out.rhs /= std::pow(set_probability(sp, a), alpha);
  const std::size_t n = sp.num_points();
  for (std::size_t k = 0; k < n; ++k) {
    const Point x = sp.point(k);
    const double px = sp.prob(x);
    if (px == 0) continue;
    out.lhs += px * std::pow(out.base, fs_sets(as, x, exponent_s));
  }
  out.holds = out.lhs <= out.rhs * (1 + kIsoRelativeSlack);
  return out;
}

// ---------------------------------------------------------------------------
// Tail bounds for v(S), S drawn with independent items.

// Threshold (r/s) a + k of the partitioning tail bound.
inline double qpart_tail_threshold(double a, double k, int r, int s) { return static_cast<double>(r) / s * a + k; }

// t(alpha, r, s)^{-k} P[v(S) <= a]^{-alpha r}; p_le_a = 1/2 is the median
// convention.
inline double tail_bound_qpart(double a, double k, int r, int s, int q, double alpha, double p_le_a = 0.5) {
  if (a < 0 || k < 0) throw std::invalid_argument("tail_bound_qpart: need a, k >= 0");
  if (s < 1 || s >= r || (1LL << r) > q) throw std::domain_error("tail_bound_qpart: need 1 <= s < r <= log2 q");
  if (alpha * s < 1 - 1e-12) throw std::domain_error("tail_bound_qpart: requires alpha >= 1/s");
  if (!(p_le_a > 0) || p_le_a > 1) throw std::invalid_argument("tail_bound_qpart: probability must be in (0, 1]");
  const double t = solve_t({alpha, r, s});
  return std::pow(t, -k) * std::pow(p_le_a, -alpha * r);
}

// q^{-k} 2^q, valid at threshold q a + k with a the median.
inline double tail_bound_schechtman(double a, double k, int q) {
  if (q < 2 || a < 0 || k < 0) throw std::invalid_argument("tail_bound_schechtman: need q >= 2, a, k >= 0");
  return std::pow(static_cast<double>(q), -k) * std::pow(2.0, q);
}

// Best median-convention bound on P[v(S) >= x] over all valid (r, s) with
// alpha = 1/s, capped at 1.
inline double qpart_survival_bound(double median, double x, int q) {
  double best = 1;
  for (int r = 2; (1LL << r) <= q; ++r) {
    for (int s = 1; s < r; ++s) {
      const double k = x - qpart_tail_threshold(median, 0, r, s);
      if (k < 0) continue;
      best = std::min(best, tail_bound_qpart(median, k, r, s, q, 1.0 / s));
    }
  }
  return best;
}

inline double schechtman_survival_bound(double median, double x, int q) {
  const double k = x - q * median;
  if (k < 0) return 1;
  return std::min(1.0, tail_bound_schechtman(median, k, q));
}

enum class TailSide { kUpper, kLower };

inline double tail_bound_selfbounding(double mean, double t, int m, int q, TailSide side) {
  if (t < 0 || mean < 0 || m < 1 || q < 1) throw std::invalid_argument("tail_bound_selfbounding: bad arguments");
  if (t == 0) return 1;
  const double a = (m + q - 1) / q;
  if (side == TailSide::kLower) {
    if (t > mean) throw std::domain_error("tail_bound_selfbounding: lower tail needs t <= mean");
    return std::exp(-t * t / (2 * a * mean));
  }
  const double c = (3 * a - 1) / 6;
  return std::exp(-t * t / (2 * (a * mean + c * t)));
}

// ---------------------------------------------------------------------------
// Self-bounding check with f_i(x^{(i)}) = v(S \ {i}).

struct SelfBoundingResult {
  bool holds = true;
  std::optional<Mask> witness;  // first S where the sum condition fails
  Rational drop_sum;            // sum_i (v(S) - v(S \ {i})) at the witness
};

inline SelfBoundingResult check_self_bounding(const Valuation& v, const Rational& a, const Rational& b) {
  const int m = v.m();
  for (Mask s = 0; s < v.size(); ++s) {
    for (int i = 0; i < m; ++i) {
      const Mask bit = Mask{1} << i;
      if (s & bit) continue;
      const Rational d = v(s | bit) - v(s);
      if (d < 0 || d > 1) throw std::invalid_argument("check_self_bounding: valuation is not 1-Lipschitz");
    }
  }
  SelfBoundingResult out;
  for (Mask s = 0; s < v.size(); ++s) {
    Rational sum = 0;
    for (Mask r = s; r != 0; r &= r - 1) sum += v(s) - v(s & ~(r & (~r + 1)));
    if (sum > a * v(s) + b) {
      out.holds = false;
      out.witness = s;
      out.drop_sum = sum;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo.

using ItemMarginals = std::vector<double>;

struct MCTail {
  std::vector<double> sorted;  // ascending
  double median = 0;           // lower middle order statistic
  double mean = 0;
  double stddev = 0;  // sample standard deviation (n - 1 denominator)

  // Fraction of samples >= x.
  double survival(double x) const {
    if (sorted.empty()) return 0;
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
  }
};

inline constexpr std::size_t kMCChunk = 4096;

// Sample i of chunk c draws one 32-bit word per item from stream c of seed.
inline MCTail mc_tail(const Valuation& v, const ItemMarginals& pi, std::uint64_t seed, std::size_t n,
                      int threads = 1) {
  const int m = v.m();
  if (n < 1) throw std::invalid_argument("mc_tail: need n >= 1");
  if (static_cast<int>(pi.size()) != m) throw std::invalid_argument("mc_tail: marginals must have length m");
  std::vector<std::uint64_t> cut(m);
  for (int i = 0; i < m; ++i) {
    if (!(pi[i] >= 0 && pi[i] <= 1)) throw std::invalid_argument("mc_tail: marginals must lie in [0, 1]");
    cut[i] = static_cast<std::uint64_t>(std::ldexp(pi[i], 32));
  }
  std::vector<double> table(v.size());
  for (Mask s = 0; s < v.size(); ++s) table[s] = to_double(v(s));

  std::vector<double> samples(n);
  const std::size_t chunks = (n + kMCChunk - 1) / kMCChunk;
  auto work = [&](std::size_t first) {
    for (std::size_t c = first; c < chunks; c += static_cast<std::size_t>(std::max(threads, 1))) {
      CounterRng rng(seed, c);
      const std::size_t end = std::min(n, (c + 1) * kMCChunk);
      for (std::size_t k = c * kMCChunk; k < end; ++k) {
        Mask s = 0;
        for (int i = 0; i < m; ++i) {
          if (rng() < cut[i]) s |= Mask{1} << i;
        }
        samples[k] = table[s];
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t));
    for (auto& th : pool) th.join();
  }

  MCTail out;
  double sum = 0;
  for (double x : samples) sum += x;
  out.mean = sum / static_cast<double>(n);
  double sq = 0;
  for (double x : samples) sq += (x - out.mean) * (x - out.mean);
  out.stddev = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : 0;
  std::sort(samples.begin(), samples.end());
  out.median = samples[(n - 1) / 2];
  out.sorted = std::move(samples);
  return out;
}

// ---------------------------------------------------------------------------
// Median to mean.

// (1 + delta) med + k + 2^{1+delta} (1+delta)^{-k} / ln(1+delta) at k = 1/ln(1+delta).
inline double median_mean_bound(double med, double delta) {
  if (!(delta > 0) || delta > 1) throw std::domain_error("median_mean_bound: need 0 < delta <= 1");
  const double l = std::log1p(delta);
  const double k = 1 / l;
  return (1 + delta) * med + k + std::pow(2.0, 1 + delta) * std::pow(1 + delta, -k) / l;
}

inline int ceil_log2(int q) {
  int r = 0;
  while ((1LL << r) < q) ++r;
  return r;
}

// delta = 1/ceil(log2 q).
inline double median_mean_bound_qpart(double med, int q) {
  if (q < 2) throw std::invalid_argument("median_mean_bound_qpart: need q >= 2");
  return median_mean_bound(med, 1.0 / ceil_log2(q));
}

// delta = 1/sqrt(med), clamped to 1 for med < 1.
inline double median_mean_bound_xos(double med) {
  if (med < 0) throw std::invalid_argument("median_mean_bound_xos: need med >= 0");
  return median_mean_bound(med, med > 1 ? 1 / std::sqrt(med) : 1.0);
}

// (e^delta / (1+delta)^{1+delta})^mu.
inline double chernoff_bound(double mu, double delta) {
  if (mu < 0 || !(delta > 0)) throw std::domain_error("chernoff_bound: need mu >= 0, delta > 0");
  return std::exp(mu * (delta - (1 + delta) * std::log1p(delta)));
}

}  // namespace qpart
