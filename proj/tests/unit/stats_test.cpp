// Copyright 2026 The pwsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pwsel/stats.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pwsel/gf.hpp"
#include "pwsel/rng.hpp"

namespace pwsel::stats {
namespace {

TEST(AccumulatorTest, MeanVarianceAndMerge) {
  Accumulator a, b, all;
  for (double x : {1.0, 2.0, 3.0}) {
    a.add(x);
    all.add(x);
  }
  for (double x : {4.0, 5.0}) {
    b.add(x);
    all.add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.count, 5u);
  EXPECT_DOUBLE_EQ(a.mean(), 3.0);
  EXPECT_DOUBLE_EQ(a.variance(), 2.5);
  EXPECT_DOUBLE_EQ(a.variance(), all.variance());
}

TEST(EstimateTest, NormalInterval) {
  Accumulator a;
  for (double x : {1.0, 2.0, 3.0, 4.0}) a.add(x);
  const auto e = Estimate::from(a, 3.0);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt((5.0 / 3.0) / 4.0), 1e-12);
  EXPECT_NEAR(e.ci_high - e.mean, 3.0 * e.std_error, 1e-12);
  EXPECT_LE(e.ci_low, e.mean);
}

TEST(EstimateTest, ExactHasZeroWidth) {
  const auto e = Estimate::exact(0.25);
  EXPECT_EQ(e.ci_low, 0.25);
  EXPECT_EQ(e.ci_high, 0.25);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(EstimateTest, WilsonIntervalContainsPointAndStaysInUnit) {
  for (auto [s, n] : {std::pair<std::uint64_t, std::uint64_t>{0, 30}, {30, 30}, {7, 100}, {1, 1}}) {
    const auto e = Estimate::proportion(s, n, 3.0);
    EXPECT_GE(e.ci_low, 0.0);
    EXPECT_LE(e.ci_high, 1.0);
    EXPECT_LE(e.ci_low, e.mean);
    EXPECT_GE(e.ci_high, e.mean);
  }
  // 0 of 30 at z = 3: upper bound z^2 / (n + z^2) = 9 / 39.
  EXPECT_NEAR(Estimate::proportion(0, 30, 3.0).ci_high, 9.0 / 39.0, 1e-12);
}

TEST(EstimateTest, RatioOfConstantPairs) {
  PairAccumulator p;
  for (int i = 0; i < 10; ++i) p.add(2.0, 4.0);
  const auto r = Estimate::ratio(p);
  EXPECT_DOUBLE_EQ(r.mean, 0.5);
  EXPECT_NEAR(r.std_error, 0.0, 1e-12);
}

TEST(EstimateTest, ScaledNegativeSwapsBounds) {
  const auto e = Estimate::normal(1.0, 0.1, 10, 3.0).scaled(-2.0);
  EXPECT_DOUBLE_EQ(e.mean, -2.0);
  EXPECT_LT(e.ci_low, e.ci_high);
}

TEST(ChiSquareTest, SurvivalMatchesKnownQuantile) {
  // 95th percentile of chi-square with 1 dof is 3.841459.
  EXPECT_NEAR(chi_square_survival(3.841459, 1), 0.05, 1e-6);
  EXPECT_EQ(chi_square_survival(10.0, 0), 1.0);
}

TEST(ChiSquareTest, GoodnessOfFitPerfectCounts) {
  const std::vector<std::uint64_t> obs = {25, 25, 25, 25};
  const std::vector<double> p = {0.25, 0.25, 0.25, 0.25};
  const auto r = chi_square_gof(obs, p);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.dof, 3u);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_THROW(chi_square_gof(obs, std::vector<double>{1.0}), PreconditionError);
}

TEST(ChiSquareTest, IndependenceDetectsDependence) {
  const std::vector<std::uint64_t> indep = {100, 100, 100, 100};
  EXPECT_NEAR(chi_square_independence(indep, 2, 2).p_value, 1.0, 1e-12);
  const std::vector<std::uint64_t> dep = {200, 0, 0, 200};
  EXPECT_LT(chi_square_independence(dep, 2, 2).p_value, 1e-10);
}

TEST(ChiSquareTest, IndependenceDropsEmptyRows) {
  const std::vector<std::uint64_t> t = {50, 50, 0, 0, 50, 50};
  const auto r = chi_square_independence(t, 3, 2);
  EXPECT_EQ(r.dof, 1u);
}

// Property: uniform independent draws are rarely rejected.
TEST(ChiSquareTest, IndependentDrawsNotRejected) {
  Rng rng(2024);
  std::vector<std::uint64_t> t(16, 0);
  for (int i = 0; i < 40000; ++i) ++t[rng.uniform_below(4) * 4 + rng.uniform_below(4)];
  EXPECT_GT(chi_square_independence(t, 4, 4).p_value, 1e-4);
}

TEST(ZTest, ConfidenceToMultiplier) {
  EXPECT_NEAR(z_for_confidence(0.9973002039), 3.0, 1e-6);
  EXPECT_NEAR(z_for_confidence(0.95), 1.959964, 1e-5);
  EXPECT_THROW(z_for_confidence(1.0), PreconditionError);
}

}  // namespace
}  // namespace pwsel::stats
