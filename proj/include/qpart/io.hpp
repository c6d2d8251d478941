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

// JSON input/output. Rationals are written as fraction strings ("3/2");
// on input both fraction strings and JSON integers are accepted. Every
// parse error is an InputError naming the offending field path.

#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpart/classify.hpp"
#include "qpart/concent.hpp"
#include "qpart/costshare.hpp"
#include "qpart/mph.hpp"
#include "qpart/posted.hpp"
#include "qpart/rational.hpp"
#include "qpart/setfn.hpp"

namespace qpart {

using json = nlohmann::json;

class InputError : public std::runtime_error {
 public:
  InputError(std::string field, const std::string& message)
      : std::runtime_error((field.empty() ? std::string("input") : field) + ": " + message),
        field_(std::move(field)),
        message_(message) {}

  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }

 private:
  std::string field_;
  std::string message_;
};

namespace io {

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
inline std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(join(path, key), "missing field");
  return *it;
}

inline long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError(path, "expected an integer");
  return j.get<long long>();
}

inline int integer_in(const json& j, const std::string& path, long long lo, long long hi) {
  const long long x = integer(j, path);
  if (x < lo || x > hi) {
    throw InputError(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

inline double real(const json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  return j.get<double>();
}

inline const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected an array");
  return j;
}

}  // namespace io

inline Rational rational_from_json(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) throw InputError(path, "expected a fraction string or an integer");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(path, e.what());
  }
}

inline json rational_to_json(const Rational& r) { return to_string(r); }

inline std::vector<Rational> rationals_from_json(const json& j, const std::string& path) {
  io::array(j, path);
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_from_json(j[i], io::index(path, i)));
  return out;
}

inline json rationals_to_json(const std::vector<Rational>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(rational_to_json(x));
  return out;
}

inline Mask mask_from_json(const json& j, const std::string& path, int m) {
  if (!j.is_number_integer()) throw InputError(path, "expected an integer bitmask");
  const long long x = j.get<long long>();
  if (x < 0 || x >= (1LL << m)) throw InputError(path, "bitmask " + std::to_string(x) + " out of range for m = " + std::to_string(m));
  return static_cast<Mask>(x);
}

// {"kind": "threshold" | "setcover_f2" | "xos" | "binomial_floor" | "random_subadditive", ...}
inline GeneratorSpec generator_from_json(const json& j, const std::string& path) {
  const json& kind_j = io::member(j, "kind", path);
  if (!kind_j.is_string()) throw InputError(io::join(path, "kind"), "expected a string");
  const std::string kind = kind_j.get<std::string>();
  auto m_of = [&](int lo, int hi) { return io::integer_in(io::member(j, "m", path), io::join(path, "m"), lo, hi); };
  if (kind == "threshold") {
    return ThresholdSpec{m_of(2, kMaxStoredItems), rational_from_json(io::member(j, "top", path), io::join(path, "top"))};
  }
  if (kind == "setcover_f2") return SetCoverF2Spec{io::integer_in(io::member(j, "a", path), io::join(path, "a"), 2, 4)};
  if (kind == "xos") {
    const int m = m_of(1, kMaxStoredItems);
    const std::string cp = io::join(path, "clauses");
    const json& cj = io::array(io::member(j, "clauses", path), cp);
    std::vector<std::vector<Rational>> clauses;
    for (std::size_t i = 0; i < cj.size(); ++i) clauses.push_back(rationals_from_json(cj[i], io::index(cp, i)));
    return XosClausesSpec{m, std::move(clauses)};
  }
  if (kind == "binomial_floor") {
    const int m = m_of(1, kMaxStoredItems);
    return BinomialFloorSpec{m, io::integer_in(io::member(j, "k", path), io::join(path, "k"), 1, m)};
  }
  if (kind == "random_subadditive") {
    const json& seed = io::member(j, "seed", path);
    if (!seed.is_number_unsigned()) throw InputError(io::join(path, "seed"), "expected a nonnegative integer");
    return RandomSubadditiveSpec{m_of(1, kMaxAxiomItems), seed.get<std::uint64_t>()};
  }
  throw InputError(io::join(path, "kind"), "unknown generator '" + kind + "'");
}

// Either {"m": M, "values": [...]} with 2^M entries indexed by bitmask, or
// {"generator": {...}}.
inline Valuation valuation_from_json(const json& j, const std::string& path = "") {
  if (!j.is_object()) throw InputError(path, "expected a valuation object");
  try {
    if (j.contains("generator")) return generate(generator_from_json(j["generator"], io::join(path, "generator")));
  } catch (const std::logic_error& e) {
    throw InputError(io::join(path, "generator"), e.what());
  }
  const int m = io::integer_in(io::member(j, "m", path), io::join(path, "m"), 0, kMaxStoredItems);
  const std::string vp = io::join(path, "values");
  const json& vj = io::array(io::member(j, "values", path), vp);
  if (vj.size() != (std::size_t{1} << m)) {
    throw InputError(vp, "expected " + std::to_string(std::size_t{1} << m) + " entries, got " + std::to_string(vj.size()));
  }
  auto values = rationals_from_json(vj, vp);
  try {
    return Valuation(m, std::move(values));
  } catch (const std::logic_error& e) {
    throw InputError(vp, e.what());
  }
}

inline json valuation_to_json(const Valuation& v) {
  return json{{"m", v.m()}, {"values", rationals_to_json(v.values())}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path, std::string("malformed JSON: ") + e.what());
  }
}

inline Valuation load_valuation(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return valuation_from_json(j);
  } catch (const InputError& e) {
    throw InputError(e.field().empty() ? path : path + ":" + e.field(), e.message());
  }
}

inline json partition_to_json(const Partition& p) {
  json blocks = json::array();
  for (Mask b : p.blocks) blocks.push_back(b);
  return json{{"subset", p.subset}, {"blocks", blocks}};
}

inline Partition partition_from_json(const json& j, const std::string& path, int m) {
  const std::string bp = io::join(path, "blocks");
  const json& bj = io::array(io::member(j, "blocks", path), bp);
  std::vector<Mask> blocks;
  for (std::size_t i = 0; i < bj.size(); ++i) blocks.push_back(mask_from_json(bj[i], io::index(bp, i), m));
  try {
    return make_partition(std::move(blocks));
  } catch (const std::invalid_argument& e) {
    throw InputError(bp, e.what());
  }
}

// {"S": mask, "blocks": [masks], "cover": [{"T": block-index mask, "alpha"}],
//  "lhs": cover value, "rhs": v(S)}.
inline json witness_to_json(const ClassificationWitness& w) {
  json cover = json::array();
  for (const auto& c : w.cover) cover.push_back(json{{"T", c.t}, {"alpha", rational_to_json(c.alpha)}});
  json blocks = json::array();
  for (Mask b : w.partition.blocks) blocks.push_back(b);
  return json{{"S", w.subset},
              {"blocks", blocks},
              {"cover", cover},
              {"lhs", rational_to_json(w.lhs)},
              {"rhs", rational_to_json(w.rhs)}};
}

inline ClassificationWitness witness_from_json(const json& j, const std::string& path, int m) {
  ClassificationWitness w;
  w.subset = mask_from_json(io::member(j, "S", path), io::join(path, "S"), m);
  w.partition = partition_from_json(j, path, m);
  const std::string cp = io::join(path, "cover");
  const json& cj = io::array(io::member(j, "cover", path), cp);
  for (std::size_t i = 0; i < cj.size(); ++i) {
    const std::string ip = io::index(cp, i);
    w.cover.push_back({mask_from_json(io::member(cj[i], "T", ip), io::join(ip, "T"), w.partition.k()),
                       rational_from_json(io::member(cj[i], "alpha", ip), io::join(ip, "alpha"))});
  }
  w.lhs = rational_from_json(io::member(j, "lhs", path), io::join(path, "lhs"));
  w.rhs = rational_from_json(io::member(j, "rhs", path), io::join(path, "rhs"));
  return w;
}

inline json mph_to_json(const MPHRepresentation& rep) {
  json clauses = json::array();
  for (const auto& c : rep.clauses) {
    json weights = json::array();
    for (const auto& [e, w] : c.weights) weights.push_back(json{{"edge", e}, {"weight", rational_to_json(w)}});
    clauses.push_back(json{{"weights", weights}});
  }
  return json{{"m", rep.m}, {"k", rep.k}, {"clauses", clauses}};
}

inline MPHRepresentation mph_from_json(const json& j, const std::string& path = "") {
  MPHRepresentation rep;
  rep.m = io::integer_in(io::member(j, "m", path), io::join(path, "m"), 1, kMaxStoredItems);
  rep.k = io::integer_in(io::member(j, "k", path), io::join(path, "k"), 1, rep.m);
  const std::string cp = io::join(path, "clauses");
  const json& cj = io::array(io::member(j, "clauses", path), cp);
  for (std::size_t i = 0; i < cj.size(); ++i) {
    const std::string ip = io::index(cp, i);
    const std::string wp = io::join(ip, "weights");
    const json& wj = io::array(io::member(cj[i], "weights", ip), wp);
    PHClause clause;
    clause.k = rep.k;
    for (std::size_t e = 0; e < wj.size(); ++e) {
      const std::string ep = io::index(wp, e);
      const Mask edge = mask_from_json(io::member(wj[e], "edge", ep), io::join(ep, "edge"), rep.m);
      if (edge == 0 || popcount(edge) > rep.k) throw InputError(io::join(ep, "edge"), "hyperedge must have 1..k items");
      const Rational w = rational_from_json(io::member(wj[e], "weight", ep), io::join(ep, "weight"));
      if (w < 0) throw InputError(io::join(ep, "weight"), "weight must be nonnegative");
      clause.weights[edge] += w;
    }
    rep.clauses.push_back(std::move(clause));
  }
  return rep;
}

inline json prices_to_json(const PriceVector& p) {
  return json{{"prices", rationals_to_json(p.prices)},
              {"feasible", p.feasible},
              {"total", rational_to_json(p.total)},
              {"lp_value", rational_to_json(p.lp_value)},
              {"deficit", rational_to_json(p.deficit)}};
}

// {"probs": [[p_00, p_01, ...], ...]}
inline ProductSpace space_from_json(const json& j, const std::string& path = "") {
  const std::string pp = io::join(path, "probs");
  const json& pj = io::array(io::member(j, "probs", path), pp);
  if (pj.empty() || pj.size() > static_cast<std::size_t>(kMaxSpaceDims)) throw InputError(pp, "need 1..6 coordinates");
  ProductSpace sp;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    const std::string ip = io::index(pp, i);
    const json& cj = io::array(pj[i], ip);
    if (cj.empty() || cj.size() > static_cast<std::size_t>(kMaxSpaceOutcomes)) throw InputError(ip, "need 1..4 outcomes");
    std::vector<double> probs;
    double sum = 0;
    for (std::size_t k = 0; k < cj.size(); ++k) {
      const double x = io::real(cj[k], io::index(ip, k));
      if (x < 0) throw InputError(io::index(ip, k), "negative probability");
      probs.push_back(x);
      sum += x;
    }
    if (std::abs(sum - 1) > 1e-9) throw InputError(ip, "probabilities must sum to 1");
    sp.probs.push_back(std::move(probs));
  }
  return sp;
}

// {"sets": [[point, ...], ...]} with points as outcome-index arrays.
inline std::vector<std::vector<Point>> sets_from_json(const json& j, const ProductSpace& sp, const std::string& path = "") {
  const std::string sp_path = io::join(path, "sets");
  const json& sj = io::array(io::member(j, "sets", path), sp_path);
  if (sj.size() < 2) throw InputError(sp_path, "need at least 2 sets");
  std::vector<std::vector<Point>> out;
  for (std::size_t i = 0; i < sj.size(); ++i) {
    const std::string ip = io::index(sp_path, i);
    const json& aj = io::array(sj[i], ip);
    if (aj.empty()) throw InputError(ip, "set must be nonempty");
    std::vector<Point> a;
    for (std::size_t k = 0; k < aj.size(); ++k) {
      const std::string kp = io::index(ip, k);
      const json& xj = io::array(aj[k], kp);
      if (xj.size() != static_cast<std::size_t>(sp.dims())) throw InputError(kp, "point has the wrong dimension");
      Point x;
      for (std::size_t c = 0; c < xj.size(); ++c) {
        x.push_back(io::integer_in(xj[c], io::index(kp, c), 0, static_cast<long long>(sp.probs[c].size()) - 1));
      }
      a.push_back(std::move(x));
    }
    out.push_back(std::move(a));
  }
  return out;
}

// {"buyers": [valuation or {"file": path}], "prices": [...], "order": [...]}.
// File references resolve relative to base_dir. A missing order means 0..n-1.
inline MarketInstance market_from_json(const json& j, const std::filesystem::path& base_dir, const std::string& path = "") {
  MarketInstance inst;
  const std::string bp = io::join(path, "buyers");
  const json& bj = io::array(io::member(j, "buyers", path), bp);
  if (bj.empty()) throw InputError(bp, "need at least one buyer");
  for (std::size_t i = 0; i < bj.size(); ++i) {
    const std::string ip = io::index(bp, i);
    if (bj[i].is_object() && bj[i].contains("file")) {
      const json& f = bj[i]["file"];
      if (!f.is_string()) throw InputError(io::join(ip, "file"), "expected a path string");
      inst.buyers.push_back(load_valuation((base_dir / f.get<std::string>()).string()));
    } else {
      inst.buyers.push_back(valuation_from_json(bj[i], ip));
    }
    if (inst.buyers.back().m() != inst.buyers.front().m()) throw InputError(ip, "buyers disagree on the item count");
  }
  const int m = inst.buyers.front().m();
  const std::string pp = io::join(path, "prices");
  inst.prices = rationals_from_json(io::member(j, "prices", path), pp);
  if (static_cast<int>(inst.prices.size()) != m) throw InputError(pp, "need one price per item");
  for (std::size_t i = 0; i < inst.prices.size(); ++i) {
    if (inst.prices[i] < 0) throw InputError(io::index(pp, i), "negative price");
  }
  const int n = static_cast<int>(inst.buyers.size());
  if (j.contains("order")) {
    const std::string op = io::join(path, "order");
    const json& oj = io::array(j["order"], op);
    if (oj.size() != inst.buyers.size()) throw InputError(op, "order must list every buyer once");
    std::vector<int> seen(n, 0);
    for (std::size_t i = 0; i < oj.size(); ++i) {
      const int b = io::integer_in(oj[i], io::index(op, i), 0, n - 1);
      if (seen[b]++) throw InputError(io::index(op, i), "buyer listed twice");
      inst.order.push_back(b);
    }
  } else {
    for (int b = 0; b < n; ++b) inst.order.push_back(b);
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Reports.

enum class ReportFormat { kText, kJson, kCsv };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "text") return ReportFormat::kText;
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  throw InputError("--format", "expected text, json or csv");
}

namespace io {

inline std::string scalar_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? " " : "") + scalar_text(j[i]);
    out.emplace_back(prefix, s);
  } else {
    out.emplace_back(prefix, scalar_text(j));
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace io

// Tabular reports carry {"table": {"columns": [...], "rows": [[...], ...]}};
// CSV emits that table, or key,value pairs for anything else. Text emits
// "key: value" lines, except that a report with a "text" member prints it
// verbatim.
inline void write_report(const json& report, ReportFormat format, std::ostream& os) {
  if (format == ReportFormat::kJson) {
    os << report.dump(2) << "\n";
    return;
  }
  if (format == ReportFormat::kCsv) {
    if (report.contains("table")) {
      const auto& t = report["table"];
      std::string header;
      for (std::size_t i = 0; i < t["columns"].size(); ++i) header += (i ? "," : "") + io::scalar_text(t["columns"][i]);
      os << header << "\n";
      for (const auto& row : t["rows"]) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) line += (i ? "," : "") + io::csv_field(io::scalar_text(row[i]));
        os << line << "\n";
      }
      return;
    }
    std::vector<std::pair<std::string, std::string>> kv;
    io::flatten(report, "", kv);
    os << "key,value\n";
    for (const auto& [k, v] : kv) os << io::csv_field(k) << "," << io::csv_field(v) << "\n";
    return;
  }
  if (report.contains("text")) {
    os << io::scalar_text(report["text"]) << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> kv;
  io::flatten(report, "", kv);
  for (const auto& [k, v] : kv) os << k << ": " << v << "\n";
}

inline void save_report(const json& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw InputError(path, "cannot open output file");
  write_report(report, format, out);
}

}  // namespace qpart
