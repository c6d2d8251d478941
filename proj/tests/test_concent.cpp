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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "fs_oracle.hpp"
#include "oracles.hpp"
#include "qpart/classify.hpp"
#include "qpart/concent.hpp"

namespace qpart {
namespace {

double t_residual(double t, double alpha, int q, int s) {
  return std::abs(t + alpha * q * std::pow(t, -1 / (alpha * s)) - alpha * q - 1);
}

TEST(RootsTest, AlphaOneOverSGivesQOverS) {
  EXPECT_NEAR(solve_t({0.5, 4, 2}), 2.0, 1e-10);
  for (int q = 2; q <= 64; ++q) {
    for (int s = 1; s < q; ++s) {
      EXPECT_NEAR(solve_t({1.0 / s, q, s}), static_cast<double>(q) / s, 1e-10) << q << " " << s;
    }
  }
}

TEST(RootsTest, QuadraticCase) { EXPECT_NEAR(solve_t({1, 2, 1}), 2.0, 1e-10); }

TEST(RootsTest, RandomResiduals) {
  CounterRng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int q = rng.between(2, 30);
    const int s = rng.between(1, q - 1);
    const double alpha = 1.0 / s + rng.uniform(0, 3);
    const double t = solve_t({alpha, q, s});
    EXPECT_GT(t, 1);
    EXPECT_LE(t_residual(t, alpha, q, s), 1e-10);
  }
}

TEST(RootsTest, RejectsSmallAlpha) {
  EXPECT_THROW(solve_t({0.4, 5, 2}), std::domain_error);
  EXPECT_THROW(solve_t({1, 3, 3}), std::invalid_argument);
}

TEST(RootsTest, TMinExample) {
  const auto c = t_min_candidates({0.1, 5, 2});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], 1.41, 0.01);
  EXPECT_NEAR(c[1], 1.38, 0.01);
  EXPECT_NEAR(solve_t_min({0.1, 5, 2}), 1.38, 0.01);
  EXPECT_EQ(t_min_candidates({0.3, 4, 1}).size(), 1u);
}

TEST(RootsTest, TMinMatchesTWhenAlphaLarge) {
  for (int q = 3; q <= 8; ++q) {
    for (int s = 1; s < q; ++s) {
      for (double extra : {0.0, 0.3, 2.0}) {
        const RootParams p{1.0 / s + extra, q, s};
        EXPECT_NEAR(solve_t_min(p), solve_t(p), 1e-10);
      }
    }
  }
}

TEST(RootsTest, Tau) {
  const double tau = solve_tau();
  EXPECT_GT(tau, 0.9);
  EXPECT_LT(tau, 1.0);
  EXPECT_LE(std::abs(std::exp(tau / 2) + std::exp(-tau) - 2), 1e-10);
}

TEST(RootsTest, XiAndZ) {
  for (double delta : {0.1, 0.5, 1.0}) EXPECT_DOUBLE_EQ(solve_xi(1 + delta, delta), 1 + delta);
  // xi(alpha r, r/s - 1) = t(alpha, r, s).
  for (int r = 2; r <= 6; ++r) {
    for (int s = 1; s < r; ++s) {
      const double alpha = 1.0 / s + 0.25;
      EXPECT_NEAR(solve_xi(alpha * r, static_cast<double>(r) / s - 1), solve_t({alpha, r, s}), 1e-10);
    }
  }
  const double xi = solve_xi(3, 0.5);
  EXPECT_LE(std::abs(xi + 3 * std::pow(xi, -1.5 / 3) - 4), 1e-10);
  for (int q = 2; q <= 6; ++q) EXPECT_NEAR(solve_z(q, 1), q, 1e-10);
  EXPECT_THROW(solve_xi(1.2, 0.5), std::domain_error);
}

// For x in [0,1]^q: min(t, (product of the s largest x)^{-alpha}) + alpha sum x <= alpha q + 1.
TEST(RootsTest, PointwiseInequality) {
  CounterRng rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    const int q = rng.between(2, 8);
    const int s = rng.between(1, q - 1);
    const double alpha = 1.0 / s + rng.uniform(0, 2);
    const double t = solve_t({alpha, q, s});
    std::vector<double> x(q);
    for (auto& xi : x) xi = rng.uniform01();
    if (trial % 7 == 0) x[0] = 0;
    std::vector<double> desc = x;
    std::sort(desc.rbegin(), desc.rend());
    double prod = 1;
    for (int i = 0; i < s; ++i) prod *= desc[i];
    const double inner = prod == 0 ? t : std::min(t, std::pow(prod, -alpha));
    double sum = 0;
    for (double xi : x) sum += xi;
    EXPECT_LE(inner + alpha * sum, alpha * q + 1 + 1e-9);
    // Tight at the constant vector t^{-1/(alpha s)}.
    const double c = std::pow(t, -1 / (alpha * s));
    const double at_c = std::min(t, std::pow(c, -alpha * s)) + alpha * q * c;
    EXPECT_NEAR(at_c, alpha * q + 1, 1e-8);
  }
}

TEST(FsTest, Points) {
  EXPECT_EQ(fs_points({{1, 2}, {1, 2}}, {1, 2}, 2), 0);
  EXPECT_EQ(fs_points({{0, 0, 0}, {0, 1, 1}}, {1, 1, 0}, 1), 1);
  EXPECT_EQ(fs_points({{0, 0, 0}, {0, 0, 0}}, {1, 1, 1}, 2), 3);
  EXPECT_EQ(fs_points({{0, 0, 0}, {0, 1, 1}}, {0, 1, 0}, 2), 2);
}

TEST(FsTest, Sets) {
  const std::vector<Point> a{{0, 0}, {1, 1}};
  EXPECT_EQ(fs_sets({a, a}, {1, 1}, 2), 0);
  EXPECT_EQ(fs_sets({{{0, 0, 0}}, {{0, 1, 1}}}, {1, 1, 0}, 1), 1);
  // Enlarging a set never increases the distance.
  const std::vector<Point> small{{0, 0, 1}};
  const std::vector<Point> large{{0, 0, 1}, {1, 1, 1}};
  for (int x = 0; x < 8; ++x) {
    const Point p{x & 1, (x >> 1) & 1, (x >> 2) & 1};
    EXPECT_LE(fs_sets({large, small}, p, 1), fs_sets({small, small}, p, 1));
  }
  EXPECT_THROW(fs_sets({{}, small}, {0, 0, 0}, 1), std::invalid_argument);
  std::vector<Point> big(1001, Point{0});
  EXPECT_THROW(fs_sets({big, big}, {0}, 1), std::length_error);
}

ProductSpace uniform_binary(int n) { return {std::vector<std::vector<double>>(n, {0.5, 0.5})}; }


TEST(IsoTest, WholeSpaceIsTight) {
  const auto sp = uniform_binary(3);
  const auto omega = oracle::all_points(sp);
  const auto r = verify_isoperimetric(sp, {omega, omega, omega}, 1, 2);
  EXPECT_NEAR(r.lhs, 1, 1e-12);
  EXPECT_NEAR(r.rhs, 1, 1e-12);
  EXPECT_TRUE(r.holds);
}

// Omega = {0,1}^2 uniform, A1 = A2 = {(0,0)}, alpha = 1, s = 1: t = 2 and
// f^1 is the number of nonzero coordinates, so lhs = (1 + 2 + 2 + 4)/4.
TEST(IsoTest, HandExample) {
  const auto r = verify_isoperimetric(uniform_binary(2), {{{0, 0}}, {{0, 0}}}, 1, 1);
  EXPECT_NEAR(r.base, 2, 1e-10);
  EXPECT_NEAR(r.lhs, 9.0 / 4, 1e-10);
  EXPECT_NEAR(r.rhs, 16, 1e-10);
  EXPECT_TRUE(r.holds);
}

TEST(IsoTest, RandomConfigurationsMatchOracle) {
  CounterRng rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng.between(1, 3);
    ProductSpace sp;
    for (int i = 0; i < n; ++i) {
      const int k = rng.between(2, 3);
      std::vector<double> p(k);
      double sum = 0;
      for (auto& x : p) sum += (x = rng.uniform(0.1, 1));
      for (auto& x : p) x /= sum;
      sp.probs.push_back(p);
    }
    const auto omega = oracle::all_points(sp);
    const int q = rng.between(2, 3);
    std::vector<std::vector<Point>> as(q);
    for (auto& a : as) {
      for (const auto& x : omega) {
        if (rng.below(3) == 0) a.push_back(x);
      }
      if (a.empty()) a.push_back(omega[rng.below(static_cast<std::uint32_t>(omega.size()))]);
    }
    const int s = rng.between(1, q - 1);
    const double alpha = 1.0 / s + rng.uniform(0, 1);
    const auto r = verify_isoperimetric(sp, as, alpha, s);
    double lhs = 0;
    for (const auto& x : omega) lhs += sp.prob(x) * std::pow(r.base, oracle::brute_fs(as, x, s));
    EXPECT_NEAR(r.lhs, lhs, 1e-9);
    EXPECT_TRUE(r.holds) << trial;
    EXPECT_TRUE(verify_isoperimetric(sp, as, rng.uniform(0.05, 1.0), s, IsoVariant::kTMin).holds);
    EXPECT_TRUE(verify_isoperimetric(sp, as, rng.uniform(0.1, 3.0), 1, IsoVariant::kS1).holds);
    EXPECT_TRUE(verify_isoperimetric(sp, as, 0, 0, IsoVariant::kTau).holds);
  }
}

TEST(IsoTest, RejectsBadSpaces) {
  EXPECT_THROW(verify_isoperimetric({{{0.5, 0.6}}}, {{{0}}, {{0}}}, 1, 1), std::invalid_argument);
  EXPECT_THROW(verify_isoperimetric(uniform_binary(2), {{{0, 2}}, {{0, 0}}}, 1, 1), std::invalid_argument);
}

TEST(TailTest, Arithmetic) {
  EXPECT_DOUBLE_EQ(tail_bound_schechtman(0, 0, 2), 4);
  EXPECT_DOUBLE_EQ(tail_bound_schechtman(1, 3, 2), 0.5);
  EXPECT_NEAR(tail_bound_schechtman(1, 5, 3), 8.0 / 243, 1e-15);
  EXPECT_NEAR(tail_bound_qpart(1, 3, 2, 1, 4, 1), 0.5, 1e-10);
  EXPECT_NEAR(tail_bound_qpart(1, 0, 2, 1, 4, 1), 4, 1e-10);
  for (int r = 2; r <= 4; ++r) {
    for (int s = 1; s < r; ++s) {
      const double k = 2.5;
      const double expect = std::pow(static_cast<double>(r) / s, -k) * std::pow(2.0, static_cast<double>(r) / s);
      EXPECT_NEAR(tail_bound_qpart(3, k, r, s, 16, 1.0 / s), expect, 1e-9);
    }
  }
  EXPECT_THROW(tail_bound_qpart(1, 1, 3, 1, 4, 1), std::domain_error);
  EXPECT_THROW(tail_bound_qpart(1, 1, 2, 2, 4, 1), std::domain_error);
  EXPECT_DOUBLE_EQ(qpart_survival_bound(2, 3, 2), 1);
  EXPECT_NEAR(qpart_survival_bound(1, 5, 4), 0.5, 1e-10);
}

TEST(TailTest, SelfBounding) {
  EXPECT_DOUBLE_EQ(tail_bound_selfbounding(5, 0, 6, 3, TailSide::kUpper), 1);
  EXPECT_DOUBLE_EQ(tail_bound_selfbounding(5, 0, 6, 3, TailSide::kLower), 1);
  EXPECT_NEAR(tail_bound_selfbounding(8, 4, 5, 5, TailSide::kLower), std::exp(-1.0), 1e-15);
  // a = 2, c = 5/6.
  EXPECT_NEAR(tail_bound_selfbounding(3, 2, 6, 3, TailSide::kUpper), std::exp(-4 / (2 * (6 + 5.0 / 3))), 1e-15);
  EXPECT_THROW(tail_bound_selfbounding(1, 2, 4, 2, TailSide::kLower), std::domain_error);
}

TEST(SelfBoundingTest, XosIsOneZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_TRUE(check_self_bounding(oracle::random_xos(6, 3, seed), 1, 0).holds);
  }
}

TEST(SelfBoundingTest, PartitioningMembers) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto v = gen_random_subadditive(6, 500 + seed);
    if (!check_axioms(v).lipschitz) continue;
    const int level = partition_level(v);
    for (int q = 2; q <= level; ++q) {
      EXPECT_TRUE(check_self_bounding(v, (6 + q - 1) / q, 0).holds);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(SelfBoundingTest, ThresholdCounterexample) {
  for (int m = 4; m <= 8; ++m) {
    for (int q = 2; q <= m; ++q) {
      const auto v = gen_threshold(m, frac(q, q - 1));
      const Rational ratio = frac(m, q);
      EXPECT_TRUE(check_self_bounding(v, ratio, 0).holds);
      for (const Rational& a : {Rational(ratio - 1), Rational(ratio - frac(1, 2))}) {
        const auto r = check_self_bounding(v, a, 0);
        EXPECT_FALSE(r.holds);
        ASSERT_TRUE(r.witness.has_value());
        EXPECT_GT(r.drop_sum, a * v(*r.witness));
      }
    }
  }
}

TEST(SelfBoundingTest, RejectsNonLipschitz) {
  EXPECT_THROW(check_self_bounding(gen_threshold(3, 1).scaled(3), 1, 0), std::invalid_argument);
}

TEST(MonteCarloTest, Extremes) {
  const auto v = oracle::random_xos(5, 2, 1);
  const auto all = mc_tail(v, ItemMarginals(5, 1.0), 1, 1000);
  EXPECT_EQ(all.sorted.front(), to_double(v(full_mask(5))));
  EXPECT_EQ(all.sorted.back(), to_double(v(full_mask(5))));
  const auto none = mc_tail(v, ItemMarginals(5, 0.0), 1, 1000);
  EXPECT_EQ(none.sorted.back(), 0);
  EXPECT_EQ(none.median, 0);
  EXPECT_EQ(none.survival(0), 1);
  EXPECT_EQ(none.survival(1e-9), 0);
}

TEST(MonteCarloTest, AdditiveMean) {
  const std::vector<Rational> w{1, frac(1, 2), 2, frac(3, 4), 0, 1};
  const auto v = oracle::additive(w);
  const std::size_t n = 100000;
  const auto r = mc_tail(v, ItemMarginals(6, 0.5), 7, n);
  double mean = 0, var = 0;
  for (const auto& x : w) {
    mean += to_double(x) / 2;
    var += to_double(x) * to_double(x) / 4;
  }
  EXPECT_NEAR(r.mean, mean, 4 * std::sqrt(var / n));
}

TEST(MonteCarloTest, DeterministicAcrossThreads) {
  const auto v = oracle::random_xos(6, 3, 2);
  const auto a = mc_tail(v, ItemMarginals(6, 0.3), 99, 20000, 1);
  const auto b = mc_tail(v, ItemMarginals(6, 0.3), 99, 20000, 3);
  EXPECT_EQ(a.sorted, b.sorted);
  EXPECT_EQ(a.median, b.median);
  const auto c = mc_tail(v, ItemMarginals(6, 0.3), 100, 20000, 1);
  EXPECT_NE(a.sorted, c.sorted);
}

TEST(MonteCarloTest, LowerMedian) {
  const auto v = oracle::additive({1});
  // Half the samples are 0 and half 1 in expectation; the lower median of
  // an even-sized sample is the (n/2)-th order statistic.
  const auto r = mc_tail(v, {0.5}, 5, 2);
  EXPECT_EQ(r.median, r.sorted[0]);
}

TEST(MedianMeanTest, Values) {
  const double l2 = std::log(2.0);
  EXPECT_NEAR(median_mean_bound(3, 1), 6 + 1 / l2 + 4 * std::pow(2.0, -1 / l2) / l2, 1e-12);
  EXPECT_GT(median_mean_bound(0, 0.5), 0);
  EXPECT_NEAR(median_mean_bound(0, 0.5), median_mean_bound(10, 0.5) - 15, 1e-12);
  EXPECT_NEAR(median_mean_bound_qpart(4, 8), median_mean_bound(4, 1.0 / 3), 1e-15);
  EXPECT_NEAR(median_mean_bound_qpart(4, 5), median_mean_bound(4, 1.0 / 3), 1e-15);
  EXPECT_NEAR(median_mean_bound_xos(16), median_mean_bound(16, 0.25), 1e-15);
  EXPECT_THROW(median_mean_bound(1, 0), std::domain_error);
  EXPECT_THROW(median_mean_bound(1, 1.5), std::domain_error);
}

// The O(1/delta) term falls as delta grows while (1 + delta) med rises: the
// bound decreases in delta for small medians and increases for large ones.
TEST(MedianMeanTest, MonotonicityGrid) {
  for (double med : {0.0, 0.5, 1.0}) {
    for (int i = 1; i < 20; ++i) {
      EXPECT_GT(median_mean_bound(med, i / 20.0), median_mean_bound(med, (i + 1) / 20.0)) << med << " " << i;
    }
  }
  for (int i = 10; i < 20; ++i) {
    EXPECT_LT(median_mean_bound(1000, i / 20.0), median_mean_bound(1000, (i + 1) / 20.0));
  }
}

TEST(ChernoffTest, Values) {
  EXPECT_NEAR(chernoff_bound(1, std::exp(1.0) - 1), std::exp(-1.0), 1e-15);
  EXPECT_DOUBLE_EQ(chernoff_bound(0, 2), 1);
  EXPECT_NEAR(chernoff_bound(5, 1e-9), 1, 1e-12);
  EXPECT_LT(chernoff_bound(5, 1), chernoff_bound(5, 0.5));
}

}  // namespace
}  // namespace qpart
