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

// Dense two-phase tableau simplex with Bland's rule.
//
// The scalar type is a template parameter. Every library code path uses
// Rational, where results are exact and the returned solution satisfies
// each constraint by substitution. A double instantiation exists for
// cross-checking only; it compares against a fixed 1e-9 tolerance.
//
// Internal standard form: shifted/split variables y >= 0, every equality
// split into a <= and a >= row, rows sign-normalized to a nonnegative right
// hand side, slacks for <= rows, surplus plus artificial for >= rows.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpart/rational.hpp"

namespace qpart {

enum class Sense { kMaximize, kMinimize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };
enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

inline const char* status_name(LPStatus s) {
  switch (s) {
    case LPStatus::kOptimal: return "optimal";
    case LPStatus::kInfeasible: return "infeasible";
    case LPStatus::kUnbounded: return "unbounded";
  }
  return "?";
}

template <class T>
struct ScalarOps;

template <>
struct ScalarOps<Rational> {
  static int sign(const Rational& x) { return sgn(x); }
};

template <>
struct ScalarOps<double> {
  static constexpr double kEps = 1e-9;
  static int sign(double x) { return x > kEps ? 1 : (x < -kEps ? -1 : 0); }
};

template <class T>
struct Constraint {
  std::vector<T> row;
  Relation relation = Relation::kLessEqual;
  T rhs{};
};

template <class T>
struct LinearProgram {
  int n_vars = 0;
  Sense sense = Sense::kMaximize;
  std::vector<T> objective;
  std::vector<Constraint<T>> constraints;
  // Empty means every variable has lower bound 0. A nullopt entry marks a free variable.
  std::vector<std::optional<T>> lower;

  LinearProgram() = default;
  LinearProgram(int n, Sense s) : n_vars(n), sense(s), objective(n) {}

  void add(std::vector<T> row, Relation rel, T rhs) {
    constraints.push_back({std::move(row), rel, std::move(rhs)});
  }

  void set_free(int j) {
    if (lower.empty()) lower.assign(n_vars, T(0));
    lower[j] = std::nullopt;
  }

  void validate() const {
    if (n_vars < 0) throw std::invalid_argument("LinearProgram: negative n_vars");
    if (static_cast<int>(objective.size()) != n_vars) {
      throw std::invalid_argument("LinearProgram: objective length != n_vars");
    }
    if (!lower.empty() && static_cast<int>(lower.size()) != n_vars) {
      throw std::invalid_argument("LinearProgram: lower-bound length != n_vars");
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      if (static_cast<int>(constraints[i].row.size()) != n_vars) {
        throw std::invalid_argument("LinearProgram: row " + std::to_string(i) +
                                    " length != n_vars");
      }
    }
  }
};

template <class T>
struct LPResult {
  LPStatus status = LPStatus::kInfeasible;
  T value{};
  std::vector<T> solution;
  int pivots = 0;
};

// Substitutes x into every constraint and bound.
template <class T>
bool satisfies(const LinearProgram<T>& lp, const std::vector<T>& x) {
  using Ops = ScalarOps<T>;
  if (static_cast<int>(x.size()) != lp.n_vars) return false;
  for (int j = 0; j < lp.n_vars; ++j) {
    const std::optional<T> lb = lp.lower.empty() ? std::optional<T>(T(0)) : lp.lower[j];
    if (lb && Ops::sign(x[j] - *lb) < 0) return false;
  }
  for (const auto& c : lp.constraints) {
    T lhs(0);
    for (int j = 0; j < lp.n_vars; ++j) lhs += c.row[j] * x[j];
    const int s = Ops::sign(lhs - c.rhs);
    if (c.relation == Relation::kLessEqual && s > 0) return false;
    if (c.relation == Relation::kGreaterEqual && s < 0) return false;
    if (c.relation == Relation::kEqual && s != 0) return false;
  }
  return true;
}

template <class T>
T objective_value(const LinearProgram<T>& lp, const std::vector<T>& x) {
  T total(0);
  for (int j = 0; j < lp.n_vars; ++j) total += lp.objective[j] * x[j];
  return total;
}

namespace internal {

template <class T>
class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * (cols + 1)) {}

  T& at(int r, int c) { return a_[std::size_t(r) * (cols_ + 1) + c]; }
  const T& at(int r, int c) const { return a_[std::size_t(r) * (cols_ + 1) + c]; }
  T& rhs(int r) { return at(r, cols_); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  std::vector<T> obj;     // reduced costs, obj[cols] = current objective value
  std::vector<int> basis;

  void pivot(int r, int c) {
    using Ops = ScalarOps<T>;
    const T inv = T(1) / at(r, c);
    for (int j = 0; j <= cols_; ++j) at(r, j) *= inv;
    at(r, c) = T(1);
    T factor;
    for (int i = 0; i < rows_; ++i) {
      if (i == r || Ops::sign(at(i, c)) == 0) continue;
      factor = at(i, c);
      for (int j = 0; j <= cols_; ++j) {
        if (Ops::sign(at(r, j)) != 0) at(i, j) -= factor * at(r, j);
      }
      at(i, c) = T(0);
    }
    if (Ops::sign(obj[c]) != 0) {
      factor = obj[c];
      for (int j = 0; j <= cols_; ++j) {
        if (Ops::sign(at(r, j)) != 0) obj[j] -= factor * at(r, j);
      }
      obj[c] = T(0);
    }
    basis[r] = c;
  }

  void remove_row(int r) {
    a_.erase(a_.begin() + std::ptrdiff_t(r) * (cols_ + 1),
             a_.begin() + std::ptrdiff_t(r + 1) * (cols_ + 1));
    basis.erase(basis.begin() + r);
    --rows_;
  }

  void dump(std::ostream& os, const char* label) const {
    os << "-- " << label << " (" << rows_ << "x" << cols_ << ")\n";
    for (int i = 0; i < rows_; ++i) {
      os << "x" << basis[i] << " |";
      for (int j = 0; j <= cols_; ++j) os << ' ' << at(i, j);
      os << '\n';
    }
    os << "obj |";
    for (int j = 0; j <= cols_; ++j) os << ' ' << obj[j];
    os << '\n';
  }

 private:
  int rows_;
  int cols_;
  std::vector<T> a_;
};

enum class SimplexOutcome { kOptimal, kUnbounded };

// Maximizes with Bland's rule over columns [0, allowed_cols).
template <class T>
SimplexOutcome run_simplex(Tableau<T>& t, int allowed_cols, int& pivots, std::ostream* trace) {
  using Ops = ScalarOps<T>;
  T best_ratio;
  T ratio;
  for (;;) {
    int enter = -1;
    for (int j = 0; j < allowed_cols; ++j) {
      if (Ops::sign(t.obj[j]) < 0) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return SimplexOutcome::kOptimal;
    int leave = -1;
    for (int i = 0; i < t.rows(); ++i) {
      if (Ops::sign(t.at(i, enter)) <= 0) continue;
      ratio = t.rhs(i) / t.at(i, enter);
      if (leave < 0) {
        leave = i;
        best_ratio = ratio;
        continue;
      }
      const int cmp = Ops::sign(ratio - best_ratio);
      if (cmp < 0 || (cmp == 0 && t.basis[i] < t.basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return SimplexOutcome::kUnbounded;
    t.pivot(leave, enter);
    ++pivots;
    if (trace) {
      *trace << "pivot row " << leave << " col " << enter << '\n';
      t.dump(*trace, "tableau");
    }
  }
}

}  // namespace internal

template <class T>
LPResult<T> solve(const LinearProgram<T>& lp, std::ostream* trace = nullptr) {
  using Ops = ScalarOps<T>;
  lp.validate();
  const int n = lp.n_vars;

  // Column layout of the structural part: y_j for each var, plus y_j^- for free vars.
  std::vector<int> neg_col(n, -1);
  std::vector<T> shift(n, T(0));
  int structural = n;
  for (int j = 0; j < n; ++j) {
    if (lp.lower.empty()) continue;
    if (lp.lower[j]) {
      shift[j] = *lp.lower[j];
    } else {
      neg_col[j] = structural++;
    }
  }

  struct Row {
    std::vector<T> coef;
    bool geq;
    T rhs;
  };
  std::vector<Row> rows;
  auto push_row = [&](const Constraint<T>& c, bool geq) {
    Row r{std::vector<T>(structural, T(0)), geq, c.rhs};
    for (int j = 0; j < n; ++j) {
      r.coef[j] = c.row[j];
      if (neg_col[j] >= 0) r.coef[neg_col[j]] = -c.row[j];
      if (Ops::sign(shift[j]) != 0) r.rhs -= c.row[j] * shift[j];
    }
    if (Ops::sign(r.rhs) < 0) {
      for (auto& x : r.coef) x = -x;
      r.rhs = -r.rhs;
      r.geq = !r.geq;
    }
    rows.push_back(std::move(r));
  };
  for (const auto& c : lp.constraints) {
    if (c.relation != Relation::kGreaterEqual) push_row(c, false);
    if (c.relation != Relation::kLessEqual) push_row(c, true);
  }

  const int m = static_cast<int>(rows.size());
  int n_art = 0;
  for (const auto& r : rows) n_art += r.geq ? 1 : 0;
  const int slack0 = structural;
  const int art0 = structural + m;
  const int cols = art0 + n_art;

  internal::Tableau<T> t(m, cols);
  t.basis.assign(m, -1);
  t.obj.assign(cols + 1, T(0));
  int next_art = art0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < structural; ++j) t.at(i, j) = rows[i].coef[j];
    t.rhs(i) = rows[i].rhs;
    if (rows[i].geq) {
      t.at(i, slack0 + i) = T(-1);
      t.at(i, next_art) = T(1);
      t.basis[i] = next_art++;
    } else {
      t.at(i, slack0 + i) = T(1);
      t.basis[i] = slack0 + i;
    }
  }

  LPResult<T> result;
  if (n_art > 0) {
    // Phase 1: maximize -sum(artificials).
    for (int j = art0; j < cols; ++j) t.obj[j] = T(1);
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] < art0) continue;
      for (int j = 0; j <= cols; ++j) t.obj[j] -= t.at(i, j);
    }
    if (trace) t.dump(*trace, "phase 1 start");
    internal::run_simplex(t, cols, result.pivots, trace);
    if (Ops::sign(t.obj[cols]) < 0) {
      result.status = LPStatus::kInfeasible;
      return result;
    }
    // Drive zero-valued artificials out of the basis; drop redundant rows.
    for (int i = t.rows() - 1; i >= 0; --i) {
      if (t.basis[i] < art0) continue;
      int col = -1;
      for (int j = 0; j < art0; ++j) {
        if (Ops::sign(t.at(i, j)) != 0) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        t.pivot(i, col);
        ++result.pivots;
      } else {
        t.remove_row(i);
      }
    }
  }

  // Phase 2 over columns [0, art0).
  std::vector<T> cost(art0, T(0));
  const T sense_sign = lp.sense == Sense::kMaximize ? T(1) : T(-1);
  for (int j = 0; j < n; ++j) {
    cost[j] = sense_sign * lp.objective[j];
    if (neg_col[j] >= 0) cost[neg_col[j]] = -cost[j];
  }
  std::fill(t.obj.begin(), t.obj.end(), T(0));
  for (int j = 0; j < art0; ++j) t.obj[j] = -cost[j];
  for (int i = 0; i < t.rows(); ++i) {
    const int b = t.basis[i];
    if (b >= art0 || Ops::sign(cost[b]) == 0) continue;
    for (int j = 0; j <= cols; ++j) {
      if (Ops::sign(t.at(i, j)) != 0) t.obj[j] += cost[b] * t.at(i, j);
    }
  }
  if (trace) t.dump(*trace, "phase 2 start");
  if (internal::run_simplex(t, art0, result.pivots, trace) ==
      internal::SimplexOutcome::kUnbounded) {
    result.status = LPStatus::kUnbounded;
    return result;
  }

  std::vector<T> y(cols, T(0));
  for (int i = 0; i < t.rows(); ++i) y[t.basis[i]] = t.rhs(i);
  result.solution.assign(n, T(0));
  for (int j = 0; j < n; ++j) {
    result.solution[j] = shift[j] + y[j];
    if (neg_col[j] >= 0) result.solution[j] -= y[neg_col[j]];
  }
  result.value = objective_value(lp, result.solution);
  result.status = LPStatus::kOptimal;
  return result;
}

}  // namespace qpart
