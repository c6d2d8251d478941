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

// The `qpart` command line. Exit codes: 0 success, 1 a check failed (the
// report carries a witness), 2 bad input.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpart/classify.hpp"
#include "qpart/concent.hpp"
#include "qpart/costshare.hpp"
#include "qpart/io.hpp"
#include "qpart/mph.hpp"
#include "qpart/posted.hpp"
#include "qpart/suites.hpp"

namespace qpart {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

struct RunConfig {
  std::string in;
  std::string out;
  std::string format;  // empty: the subcommand default
  int threads = 1;
  int q = 0;
  bool level = false;
  bool linear = false;
  std::string check;  // witness or representation file to re-verify
  std::string witness_out;
  std::string partition;
  std::string method = "citycore";
  std::string gamma;
  double alpha = 1;
  int s = 1;
  bool tmin = false;
  std::string space;
  std::string sets;
  std::string variant = "general";
  double pi = 0.5;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  double p = 1.0 / 16;
  std::string market;
  std::string suite;
  int m = 0;
  int trials = 0;
};

struct CommandResult {
  json report;
  int code = kExitOk;
};

namespace cli {

// "1,2|3|4,5": blocks of 1-based items.
inline Partition parse_partition(const std::string& text, int m) {
  std::vector<Mask> blocks;
  std::stringstream blocks_in(text);
  std::string block;
  while (std::getline(blocks_in, block, '|')) {
    Mask b = 0;
    std::stringstream items_in(block);
    std::string item;
    while (std::getline(items_in, item, ',')) {
      int i = 0;
      try {
        std::size_t used = 0;
        i = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::logic_error&) {
        throw InputError("--partition", "bad item '" + item + "'");
      }
      if (i < 1 || i > m) throw InputError("--partition", "item " + std::to_string(i) + " outside 1.." + std::to_string(m));
      const Mask bit = Mask{1} << (i - 1);
      if (b & bit) throw InputError("--partition", "item " + std::to_string(i) + " repeated");
      b |= bit;
    }
    blocks.push_back(b);
  }
  try {
    return make_partition(std::move(blocks));
  } catch (const std::invalid_argument& e) {
    throw InputError("--partition", e.what());
  }
}

inline int require_q(const RunConfig& c) {
  if (c.q < 1) throw InputError("--q", "required, must be >= 1");
  return c.q;
}

inline CommandResult classify(const RunConfig& c) {
  const Valuation v = load_valuation(c.in);
  const ClassifyOptions opts{c.threads};
  if (!c.check.empty()) {
    json wj = read_json_file(c.check);
    if (wj.contains("witness")) wj = wj["witness"];
    const auto w = witness_from_json(wj, c.check, v.m());
    const bool reproduced = verify_witness(v, w);
    return {json{{"witness_reproduces_violation", reproduced}}, reproduced ? kExitOk : kExitCheckFailed};
  }
  if (c.level) {
    const int level = partition_level(v, c.linear ? LevelSearch::kLinear : LevelSearch::kBinary, opts);
    return {json{{"level", level}, {"text", std::to_string(level)}}, kExitOk};
  }
  const int q = require_q(c);
  const auto res = is_q_partitioning(v, q, opts);
  json report{{"q", q}, {"holds", res.holds}};
  if (res.witness) {
    report["witness"] = witness_to_json(*res.witness);
    if (!c.witness_out.empty()) save_report(report["witness"], c.witness_out, ReportFormat::kJson);
  }
  return {report, res.holds ? kExitOk : kExitCheckFailed};
}

inline CommandResult closeness_cmd(const RunConfig& c) {
  const Valuation v = load_valuation(c.in);
  const auto res = closeness(v, require_q(c), ClassifyOptions{c.threads});
  json report{{"q", c.q}, {"gamma", rational_to_json(res.gamma)}, {"gamma_decimal", to_double(res.gamma)}};
  if (res.argmin) report["argmin"] = witness_to_json(*res.argmin);
  return {report, kExitOk};
}

inline CommandResult prices(const RunConfig& c) {
  const Valuation v = load_valuation(c.in);
  if (c.partition.empty()) throw InputError("--partition", "required");
  const Partition part = parse_partition(c.partition, v.m());
  json report{{"method", c.method}, {"partition", partition_to_json(part)}};
  PriceVector res;
  bool ok = true;
  try {
    if (c.method == "citycore") {
      res = citycore_prices(v, part);
      ok = res.feasible;
    } else if (c.method == "gamma") {
      if (c.gamma.empty()) throw InputError("--gamma", "required for --method gamma");
      Rational gamma;
      try {
        gamma = parse_rational(c.gamma);
      } catch (const std::invalid_argument& e) {
        throw InputError("--gamma", e.what());
      }
      res = gamma_citycore_prices(v, part, gamma);
      report["gamma"] = rational_to_json(gamma);
      ok = res.feasible;
    } else if (c.method == "greedy") {
      res = greedy_prices(v, part);
      const Rational floor_total = v(part.subset) / harmonic(part.k() - 1);
      report["required_total"] = rational_to_json(floor_total);
      ok = coalition_constraints_hold(v, part, res.prices) && res.total >= floor_total;
    } else {
      throw InputError("--method", "expected citycore, gamma or greedy");
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(c.in, e.what());
  }
  report["result"] = prices_to_json(res);
  report["ok"] = ok;
  return {report, ok ? kExitOk : kExitCheckFailed};
}

inline CommandResult mph(const RunConfig& c) {
  const Valuation v = load_valuation(c.in);
  if (!c.check.empty()) {
    const auto rep = mph_from_json(read_json_file(c.check), "");
    const auto check = verify_mph(rep, v);
    json report{{"ok", check.ok && is_well_formed(rep)}, {"max_hyperedge", max_hyperedge_size(rep)}};
    if (check.counterexample) {
      report["witness"] = json{{"subset", *check.counterexample},
                               {"represented", rational_to_json(check.represented)},
                               {"value", rational_to_json(check.expected)}};
    }
    return {report, report["ok"].get<bool>() ? kExitOk : kExitCheckFailed};
  }
  const auto res = mph_witness(v, require_q(c), ClassifyOptions{c.threads});
  if (!res.representation) return {json{{"ok", false}, {"witness", witness_to_json(*res.rejection)}}, kExitCheckFailed};
  const auto& rep = *res.representation;
  return {json{{"ok", true}, {"max_hyperedge", max_hyperedge_size(rep)}, {"representation", mph_to_json(rep)}}, kExitOk};
}

inline CommandResult roots(const RunConfig& c) {
  const RootParams p{c.alpha, require_q(c), c.s};
  json report{{"alpha", p.alpha}, {"q", p.q}, {"s", p.s}, {"tau", solve_tau()}};
  if (c.tmin) {
    report["candidates"] = t_min_candidates(p);
    report["t_min"] = solve_t_min(p);
  } else {
    const double t = solve_t(p);
    report["t"] = t;
    report["residual"] = std::abs(t + p.alpha * p.q * std::pow(t, -1 / (p.alpha * p.s)) - p.alpha * p.q - 1);
  }
  return {report, kExitOk};
}

inline CommandResult iso(const RunConfig& c) {
  if (c.space.empty()) throw InputError("--space", "required");
  if (c.sets.empty()) throw InputError("--sets", "required");
  const ProductSpace sp = space_from_json(read_json_file(c.space));
  const auto as = sets_from_json(read_json_file(c.sets), sp);
  IsoVariant variant;
  if (c.variant == "general") {
    variant = IsoVariant::kGeneral;
  } else if (c.variant == "tmin") {
    variant = IsoVariant::kTMin;
  } else if (c.variant == "s1") {
    variant = IsoVariant::kS1;
  } else if (c.variant == "tau") {
    variant = IsoVariant::kTau;
  } else {
    throw InputError("--variant", "expected general, tmin, s1 or tau");
  }
  const auto r = verify_isoperimetric(sp, as, c.alpha, c.s, variant);
  return {json{{"variant", c.variant}, {"base", r.base}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}},
          r.holds ? kExitOk : kExitCheckFailed};
}

// Survival curve at the distinct sample values, with the partitioning bound
// (best valid (r, s), alpha = 1/s) and Schechtman's bound (best q' in 2..16),
// both at the empirical median.
inline CommandResult tails(const RunConfig& c) {
  const Valuation v = load_valuation(c.in);
  const int q = require_q(c);
  if (c.n < 1) throw InputError("--n", "must be >= 1");
  if (!(c.pi >= 0 && c.pi <= 1)) throw InputError("--pi", "must lie in [0, 1]");
  const auto mc = mc_tail(v, ItemMarginals(v.m(), c.pi), c.seed, c.n, c.threads);
  json rows = json::array();
  for (std::size_t i = 0; i < mc.sorted.size(); ++i) {
    if (i > 0 && mc.sorted[i] == mc.sorted[i - 1]) continue;
    const double x = mc.sorted[i];
    double sch = 1;
    for (int qq = 2; qq <= 16; ++qq) sch = std::min(sch, schechtman_survival_bound(mc.median, x, qq));
    rows.push_back(json::array({x, mc.survival(x), qpart_survival_bound(mc.median, x, q), sch}));
  }
  json report{{"n", c.n}, {"seed", c.seed}, {"pi", c.pi}, {"q", q}, {"median", mc.median}, {"mean", mc.mean},
              {"table", {{"columns", {"x", "empirical_survival", "bound_qpart", "bound_schechtman"}}, {"rows", rows}}}};
  return {report, kExitOk};
}

inline CommandResult minimax(const RunConfig& c) {
  const Valuation v = load_valuation(c.in);
  const auto rep = verify_minimax_step(v, c.p, require_q(c));
  auto step = [](const MinimaxStep& s) {
    return json{{"p", s.p}, {"g", s.g}, {"f", s.f}, {"f_shrunk", s.f_shrunk}, {"holds", s.holds}};
  };
  json chain = json::array();
  for (const auto& s : rep.chain) chain.push_back(step(s));
  json report{{"q", rep.q}, {"r", rep.r}, {"step", step(rep.step)}, {"chain", chain},
              {"chain_g_sum", rep.chain_g_sum}, {"chain_bound", rep.chain_bound}, {"ok", rep.ok}};
  return {report, rep.ok ? kExitOk : kExitCheckFailed};
}

inline CommandResult simulate(const RunConfig& c) {
  if (c.market.empty()) throw InputError("--market", "required");
  const auto inst = market_from_json(read_json_file(c.market), std::filesystem::path(c.market).parent_path());
  const auto out = simulate_mechanism(inst);
  json alloc = json::array();
  for (Mask s : out.allocation) alloc.push_back(s);
  json report{{"allocation", alloc},
              {"utilities", rationals_to_json(out.utilities)},
              {"welfare", rational_to_json(out.welfare)},
              {"revenue", rational_to_json(out.revenue)}};
  if (inst.buyers.front().m() <= kMaxAxiomItems) {
    const auto opt = brute_opt_welfare(inst.buyers);
    report["opt_welfare"] = rational_to_json(opt.value);
  }
  if (static_cast<int>(inst.buyers.size()) <= kMaxOrderBuyers) {
    const auto worst = worst_order_welfare(inst.buyers, inst.prices);
    report["worst_order"] = worst.order;
    report["worst_order_welfare"] = rational_to_json(worst.welfare);
  }
  Rational util = 0;
  for (const auto& u : out.utilities) util += u;
  const bool identity = out.welfare == out.revenue + util;
  report["accounting_identity"] = identity;
  return {report, identity ? kExitOk : kExitCheckFailed};
}

inline CommandResult verify(const RunConfig& c) {
  if (c.suite.empty()) throw InputError("--suite", "required");
  SuiteParams p;
  p.m = c.m;
  p.q = c.q;
  p.seed = c.seed;
  p.trials = c.trials;
  p.n = c.n;
  p.threads = c.threads;
  json report = run_suite(c.suite, p);
  const bool ok = report.value("ok", false);
  return {report, ok ? kExitOk : kExitCheckFailed};
}

inline int env_threads() {
  const char* env = std::getenv("QPART_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    const int t = std::stoi(env);
    if (t >= 1) return t;
  } catch (const std::logic_error&) {
  }
  throw InputError("QPART_THREADS", "must be a positive integer");
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Partitioning-interpolation toolkit for set functions", "qpart"};
  app.fallthrough();
  app.require_subcommand(1);
  std::optional<int> threads_flag;
  app.add_option("--threads", threads_flag, "worker threads (default: QPART_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--out", c.out, "write the report to this file");

  auto* classify = app.add_subcommand("classify", "q-partitioning membership or level");
  classify->add_option("--in", c.in, "valuation JSON")->required();
  classify->add_option("--q", c.q, "number of parts");
  classify->add_flag("--level", c.level, "print the largest q with membership");
  classify->add_flag("--linear", c.linear, "linear instead of binary level search");
  classify->add_option("--witness", c.witness_out, "write the violation witness here");
  classify->add_option("--check-witness", c.check, "re-verify a violation witness");

  auto* close = app.add_subcommand("closeness", "largest gamma with v gamma-close to Q(q)");
  close->add_option("--in", c.in)->required();
  close->add_option("--q", c.q)->required();

  auto* prices = app.add_subcommand("prices", "cost shares for a partition");
  prices->add_option("--in", c.in)->required();
  prices->add_option("--partition", c.partition, "blocks of 1-based items, e.g. 1,2|3|4,5")->required();
  prices->add_option("--method", c.method)->check(CLI::IsMember({"citycore", "gamma", "greedy"}));
  prices->add_option("--gamma", c.gamma, "target fraction for --method gamma");

  auto* mph = app.add_subcommand("mph", "MPH-ceil(m/q) representation");
  mph->add_option("--in", c.in)->required();
  mph->add_option("--q", c.q);
  mph->add_option("--check", c.check, "verify this representation JSON against the valuation");

  auto* roots = app.add_subcommand("roots", "isoperimetric bases t(alpha, q, s)");
  roots->add_option("--alpha", c.alpha)->required();
  roots->add_option("--q", c.q)->required();
  roots->add_option("--s", c.s)->required();
  roots->add_flag("--tmin", c.tmin, "minimum over the t_r candidates (any alpha > 0)");

  auto* iso = app.add_subcommand("iso", "exhaustive isoperimetric check");
  iso->add_option("--space", c.space)->required();
  iso->add_option("--sets", c.sets)->required();
  iso->add_option("--alpha", c.alpha);
  iso->add_option("--s", c.s);
  iso->add_option("--variant", c.variant)->check(CLI::IsMember({"general", "tmin", "s1", "tau"}));

  auto* tails = app.add_subcommand("tails", "Monte Carlo survival curve against tail bounds");
  tails->add_option("--in", c.in)->required();
  tails->add_option("--pi", c.pi, "item inclusion probability");
  tails->add_option("--q", c.q)->required();
  tails->add_option("--n", c.n);
  tails->add_option("--seed", c.seed);

  auto* minimax = app.add_subcommand("minimax", "capped-distribution minimax step");
  minimax->add_option("--in", c.in)->required();
  minimax->add_option("--p", c.p);
  minimax->add_option("--q", c.q)->required();

  auto* simulate = app.add_subcommand("simulate", "sequential posted-price sale");
  simulate->add_option("--market", c.market)->required();

  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("--suite", c.suite)->required()->check(CLI::IsMember(suite_names()));
  verify->add_option("--m", c.m);
  verify->add_option("--q", c.q);
  verify->add_option("--seed", c.seed);
  verify->add_option("--trials", c.trials);
  verify->add_option("--n", c.n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    c.threads = threads_flag ? *threads_flag : cli::env_threads();
    CommandResult res;
    std::string default_format = "text";
    if (classify->parsed()) {
      if (!c.level && c.check.empty() && c.q < 1) throw InputError("--q", "give --q, --level or --check-witness");
      res = cli::classify(c);
    } else if (close->parsed()) {
      res = cli::closeness_cmd(c);
    } else if (prices->parsed()) {
      res = cli::prices(c);
    } else if (mph->parsed()) {
      res = cli::mph(c);
    } else if (roots->parsed()) {
      res = cli::roots(c);
    } else if (iso->parsed()) {
      res = cli::iso(c);
    } else if (tails->parsed()) {
      res = cli::tails(c);
      default_format = "csv";
    } else if (minimax->parsed()) {
      res = cli::minimax(c);
    } else if (simulate->parsed()) {
      res = cli::simulate(c);
    } else {
      res = cli::verify(c);
    }
    const ReportFormat format = parse_format(c.format.empty() ? default_format : c.format);
    if (c.out.empty()) {
      write_report(res.report, format, out);
    } else {
      save_report(res.report, c.out, format);
    }
    return res.code;
  } catch (const InputError& e) {
    err << "qpart: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::logic_error& e) {
    // Size caps and domain violations raised by the library.
    err << "qpart: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace qpart
