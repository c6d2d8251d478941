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

// Property suites behind `qpart verify --suite NAME`. Each returns a JSON
// report with "ok" and, on failure, a "witness" that reproduces it.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qpart/classify.hpp"
#include "qpart/concent.hpp"
#include "qpart/costshare.hpp"
#include "qpart/io.hpp"
#include "qpart/posted.hpp"
#include "qpart/random.hpp"
#include "qpart/setfn.hpp"

namespace qpart {

struct SuiteParams {
  int m = 0;  // 0 selects the suite default
  int q = 0;
  std::uint64_t seed = 1;
  int trials = 0;
  std::size_t n = 0;
  int threads = 1;
};

// XOS with r clauses and weights in {0, 1/4, ..., 1}; 1-Lipschitz.
inline Valuation random_unit_xos(int m, int r, std::uint64_t seed) {
  CounterRng rng(seed, 0x705);
  std::vector<std::vector<Rational>> clauses(r, std::vector<Rational>(m));
  for (auto& c : clauses) {
    for (auto& w : c) w = frac(rng.between(0, 4), 4);
  }
  return gen_xos(m, clauses);
}

// Blocks of a uniformly random assignment of the items of s to k labels,
// empty blocks dropped.
inline Partition random_partition(Mask s, int k, CounterRng& rng) {
  std::vector<Mask> blocks(k, 0);
  for (int i : items_of(s)) blocks[rng.below(static_cast<std::uint32_t>(k))] |= Mask{1} << i;
  std::erase(blocks, Mask{0});
  return make_partition(std::move(blocks));
}

namespace suites {

inline int pick(int value, int fallback) { return value > 0 ? value : fallback; }

inline json smoothness(const SuiteParams& p) {
  const int m = pick(p.m, 5);
  const int q = pick(p.q, 4);
  const ClassifyOptions opts{p.threads};
  std::vector<Valuation> instances{gen_threshold(m, frac(q, q - 1))};
  for (int i = 0; i < pick(p.trials, 10); ++i) {
    auto v = gen_random_subadditive(m, p.seed * 1000 + i);
    if (is_q_partitioning(v, q, opts).holds) instances.push_back(std::move(v));
  }
  const auto rep = audit_smoothness(m, q, instances, opts);
  json out{{"suite", "smoothness"}, {"m", m}, {"q", q}, {"instances", instances.size()},
           {"bound", rational_to_json(rep.bound)}, {"min_gamma", rational_to_json(rep.min_gamma)}, {"ok", rep.ok}};
  for (const auto& e : rep.entries) {
    if (!e.bound_holds) {
      out["witness"] = json{{"valuation", valuation_to_json(instances[e.index])}, {"gamma", rational_to_json(e.gamma)}};
      break;
    }
  }
  return out;
}

inline json duality(const SuiteParams& p) {
  const int m = pick(p.m, 5);
  const int trials = pick(p.trials, 200);
  CounterRng rng(p.seed, 0xd0a1);
  int checked = 0;
  for (int t = 0; t < trials; ++t) {
    const auto v = t % 2 ? gen_random_subadditive(m, p.seed * 7919 + t) : gen_random_monotone(m, p.seed * 7919 + t);
    Mask s = 0;
    while (popcount(s) < 2) s = static_cast<Mask>(rng.below(static_cast<std::uint32_t>(v.size())));
    const auto part = random_partition(s, rng.between(2, popcount(s)), rng);
    const auto primal = cover_lp_primal(v, part);
    const auto dual = cover_lp_dual(v, part);
    ++checked;
    if (primal.value != dual.value) {
      return json{{"suite", "duality"},
                  {"ok", false},
                  {"checked", checked},
                  {"witness",
                   {{"valuation", valuation_to_json(v)},
                    {"partition", partition_to_json(part)},
                    {"primal", rational_to_json(primal.value)},
                    {"dual", rational_to_json(dual.value)}}}};
    }
  }
  return json{{"suite", "duality"}, {"m", m}, {"checked", checked}, {"ok", true}};
}

inline json greedy(const SuiteParams& p) {
  const int m = pick(p.m, 6);
  const int trials = pick(p.trials, 50);
  CounterRng rng(p.seed, 0x67ee);
  for (int t = 0; t < trials; ++t) {
    const auto g = gen_random_subadditive(m, p.seed * 104729 + t);
    const int q = pick(p.q, rng.between(2, std::min(m, 5)));
    std::vector<Mask> blocks(q, 0);
    for (int i = 0; i < m; ++i) blocks[i < q ? i : rng.between(0, q - 1)] |= Mask{1} << i;
    const auto part = make_partition(blocks);
    const auto res = greedy_prices(g, part);
    const Rational floor_total = g(part.subset) / harmonic(q - 1);
    if (!coalition_constraints_hold(g, part, res.prices) || res.total < floor_total) {
      return json{{"suite", "greedy"},
                  {"ok", false},
                  {"witness",
                   {{"valuation", valuation_to_json(g)},
                    {"partition", partition_to_json(part)},
                    {"prices", prices_to_json(res)},
                    {"required_total", rational_to_json(floor_total)}}}};
    }
  }
  return json{{"suite", "greedy"}, {"m", m}, {"checked", trials}, {"ok", true}};
}

inline json selfbounding(const SuiteParams& p) {
  const int m = pick(p.m, 6);
  const int q = pick(p.q, 3);
  const ClassifyOptions opts{p.threads};
  const Rational a = (m + q - 1) / q;
  int checked = 0;
  std::vector<Valuation> instances{gen_threshold(m, frac(q, q - 1))};
  for (int i = 0; i < pick(p.trials, 10); ++i) instances.push_back(random_unit_xos(m, 3, p.seed * 31 + i));
  for (int i = 0; i < pick(p.trials, 10); ++i) {
    auto v = gen_random_subadditive(m, p.seed * 37 + i);
    if (check_axioms(v).lipschitz && is_q_partitioning(v, q, opts).holds) instances.push_back(std::move(v));
  }
  for (const auto& v : instances) {
    const auto r = check_self_bounding(v, a, 0);
    ++checked;
    if (!r.holds) {
      return json{{"suite", "selfbounding"}, {"ok", false},
                  {"witness", {{"valuation", valuation_to_json(v)}, {"subset", *r.witness}, {"a", rational_to_json(a)}}}};
    }
  }
  // The threshold instance needs a >= m/q.
  const Rational below = frac(m, q) - frac(1, 2);
  const bool counterexample_fails = !check_self_bounding(instances.front(), below, 0).holds;
  return json{{"suite", "selfbounding"}, {"m", m}, {"q", q}, {"checked", checked},
              {"threshold_rejected_below_m_over_q", counterexample_fails}, {"ok", counterexample_fails}};
}

inline json iso(const SuiteParams& p) {
  const int trials = pick(p.trials, 100);
  CounterRng rng(p.seed, 0x150);
  for (int t = 0; t < trials; ++t) {
    ProductSpace sp;
    const int dims = rng.between(1, pick(p.m, 3));
    for (int i = 0; i < dims; ++i) {
      const double a = rng.uniform(0.05, 0.95);
      sp.probs.push_back({a, 1 - a});
    }
    const int q = pick(p.q, rng.between(2, 3));
    std::vector<std::vector<Point>> as(q);
    for (auto& a : as) {
      for (std::size_t k = 0; k < sp.num_points(); ++k) {
        if (rng.below(2) == 0) a.push_back(sp.point(k));
      }
      if (a.empty()) a.push_back(sp.point(rng.below(static_cast<std::uint32_t>(sp.num_points()))));
    }
    const int s = rng.between(1, q - 1);
    const double alpha = 1.0 / s + rng.uniform(0, 1);
    const auto r = verify_isoperimetric(sp, as, alpha, s);
    if (!r.holds) {
      json sets = json::array();
      for (const auto& a : as) sets.push_back(a);
      return json{{"suite", "iso"}, {"ok", false},
                  {"witness", {{"space", {{"probs", sp.probs}}}, {"sets", sets}, {"alpha", alpha}, {"s", s},
                               {"lhs", r.lhs}, {"rhs", r.rhs}}}};
    }
  }
  return json{{"suite", "iso"}, {"checked", trials}, {"ok", true}};
}

// Largest value of survival(x) - bound(x) - 4 sqrt(b(1-b)/n) over sample points.
template <typename Bound>
double worst_tail_excess(const MCTail& mc, Bound bound, double* at) {
  const double n = static_cast<double>(mc.sorted.size());
  double worst = -1;
  for (std::size_t i = 0; i < mc.sorted.size(); ++i) {
    if (i > 0 && mc.sorted[i] == mc.sorted[i - 1]) continue;
    const double x = mc.sorted[i];
    const double b = bound(x);
    const double excess = mc.survival(x) - b - 4 * std::sqrt(b * (1 - b) / n);
    if (excess > worst) {
      worst = excess;
      *at = x;
    }
  }
  return worst;
}

inline json tails(const SuiteParams& p) {
  const int m = pick(p.m, 8);
  const int q = pick(p.q, 4);
  const std::size_t n = p.n > 0 ? p.n : 100000;
  json runs = json::array();
  bool ok = true;
  std::vector<Valuation> instances{gen_threshold(m, frac(q, q - 1)), random_unit_xos(m, 3, p.seed)};
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto mc = mc_tail(instances[i], ItemMarginals(m, 0.5), p.seed + i, n, p.threads);
    double at_q = 0, at_s = 0;
    const double ex_q = worst_tail_excess(mc, [&](double x) { return qpart_survival_bound(mc.median, x, q); }, &at_q);
    const double ex_s = worst_tail_excess(mc, [&](double x) { return schechtman_survival_bound(mc.median, x, 2); }, &at_s);
    const double mean_bound = median_mean_bound_qpart(mc.median, q) + 4 * mc.stddev / std::sqrt(static_cast<double>(n));
    const bool run_ok = ex_q <= 0 && ex_s <= 0 && mc.mean <= mean_bound;
    ok = ok && run_ok;
    runs.push_back(json{{"instance", i}, {"median", mc.median}, {"mean", mc.mean}, {"mean_bound", mean_bound},
                        {"worst_excess_qpart", ex_q}, {"worst_excess_schechtman", ex_s}, {"ok", run_ok}});
    if (!run_ok) {
      return json{{"suite", "tails"}, {"ok", false}, {"runs", runs},
                  {"witness", {{"valuation", valuation_to_json(instances[i])}, {"seed", p.seed + i}, {"n", n},
                               {"x_qpart", at_q}, {"x_schechtman", at_s}}}};
    }
  }
  return json{{"suite", "tails"}, {"m", m}, {"q", q}, {"n", n}, {"runs", runs}, {"ok", ok}};
}

inline json minimax(const SuiteParams& p) {
  const int m = pick(p.m, 3);
  const int q = pick(p.q, 4);
  const int trials = pick(p.trials, 5);
  json steps = json::array();
  for (int t = 0; t < trials; ++t) {
    const auto v = random_unit_xos(m, 3, p.seed * 101 + t);
    const auto rep = verify_minimax_step(v, 1.0 / 16, q);
    steps.push_back(json{{"g", rep.step.g}, {"f", rep.step.f}, {"f_shrunk", rep.step.f_shrunk}, {"ok", rep.ok}});
    if (!rep.ok) {
      return json{{"suite", "minimax"}, {"ok", false}, {"steps", steps}, {"witness", {{"valuation", valuation_to_json(v)}, {"p", 1.0 / 16}, {"q", q}}}};
    }
  }
  return json{{"suite", "minimax"}, {"m", m}, {"q", q}, {"steps", steps}, {"ok", true}};
}

}  // namespace suites

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"smoothness", "duality", "greedy", "selfbounding", "iso", "tails", "minimax"};
  return names;
}

inline json run_suite(const std::string& name, const SuiteParams& p) {
  if (name == "smoothness") return suites::smoothness(p);
  if (name == "duality") return suites::duality(p);
  if (name == "greedy") return suites::greedy(p);
  if (name == "selfbounding") return suites::selfbounding(p);
  if (name == "iso") return suites::iso(p);
  if (name == "tails") return suites::tails(p);
  if (name == "minimax") return suites::minimax(p);
  throw InputError("--suite", "unknown suite '" + name + "'");
}

}  // namespace qpart
