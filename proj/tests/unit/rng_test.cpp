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

#include "pwsel/rng.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "pwsel/stats.hpp"

namespace pwsel {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngTest, DifferentSeedsDiffer) {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_EQ(equal, 0);
}

TEST(RngTest, DeriveIgnoresParentPosition) {
  Rng a(7), b(7);
  for (int i = 0; i < 17; ++i) b.next_u64();
  Rng ca = a.derive("trial", 3), cb = b.derive("trial", 3);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(ca.next_u64(), cb.next_u64());
}

TEST(RngTest, DeriveSeparatesLabelsAndIndices) {
  const Rng root(7);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    firsts.insert(root.derive("x", i).next_u64());
    firsts.insert(root.derive("y", i).next_u64());
  }
  EXPECT_EQ(firsts.size(), 2000u);
}

TEST(RngTest, UniformBelowStaysInRange) {
  Rng rng(3);
  for (std::uint64_t bound : {1ULL, 2ULL, 3ULL, 5ULL, 1000003ULL, ~0ULL}) {
    for (int i = 0; i < 1000; ++i) ASSERT_LT(rng.uniform_below(bound), bound);
  }
  EXPECT_THROW(rng.uniform_below(0), std::invalid_argument);
}

TEST(RngTest, UniformBelowPassesGoodnessOfFit) {
  Rng rng(11);
  constexpr std::size_t kCells = 7;
  std::vector<std::uint64_t> counts(kCells, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_below(kCells)];
  const std::vector<double> probs(kCells, 1.0 / kCells);
  EXPECT_GT(stats::chi_square_gof(counts, probs).p_value, 1e-4);
}

TEST(RngTest, Uniform01AndBernoulli) {
  Rng rng(5);
  double sum = 0.0;
  int heads = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    heads += rng.bernoulli(0.3);
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
  EXPECT_NEAR(heads / 100000.0, 0.3, 0.006);
  EXPECT_FALSE(rng.bernoulli(0.0));
  EXPECT_TRUE(rng.bernoulli(1.0));
}

TEST(RngTest, ShuffleIsDeterministicPermutation) {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(9), r2(9);
  shuffle(a.begin(), a.end(), r1);
  shuffle(b.begin(), b.end(), r2);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(RngTest, Mix64IsBijectiveOnSample) {
  std::set<std::uint64_t> out;
  for (std::uint64_t i = 0; i < 10000; ++i) out.insert(mix64(i));
  EXPECT_EQ(out.size(), 10000u);
}

}  // namespace
}  // namespace pwsel
