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

#include "pwsel/instances.hpp"

#include <set>

#include <gtest/gtest.h>

namespace pwsel::instances {
namespace {

TEST(CrsInstanceTest, Shape) {
  const CrsInstance inst(5, 5, 2);
  EXPECT_EQ(inst.q(), 5u);
  EXPECT_EQ(inst.d(), 5u);
  EXPECT_EQ(inst.c(), 2u);
  EXPECT_EQ(inst.class_size(), 3125u);
  EXPECT_EQ(inst.labels(), (std::vector<std::uint32_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(inst.sigma().rows(), 2u);
  EXPECT_EQ(inst.sigma().cols(), 5u);
  EXPECT_EQ(inst.expected_size(), Rational(5));
}

TEST(CrsInstanceTest, Preconditions) {
  EXPECT_THROW(CrsInstance(3, 2, 1), PreconditionError);
  EXPECT_THROW(CrsInstance(4, 5, 2), PreconditionError);
  EXPECT_THROW(CrsInstance(2, 5, 1), PreconditionError);
}

TEST(CrsInstanceTest, DOneRankAtMostC) {
  const CrsInstance inst(7, 6, 2);
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto a = inst.sample_d1(rng);
    ASSERT_EQ(a.size(), 6u);
    std::set<std::uint32_t> labels;
    for (const auto& e : a) labels.insert(e.label);
    EXPECT_EQ(labels.size(), 6u);
    EXPECT_LE(inst.matroid().rank(a), 2u);
  }
}

TEST(CrsInstanceTest, SampleBranches) {
  const CrsInstance inst(2, 3, 2);
  Rng rng(12);
  int d2 = 0;
  for (int t = 0; t < 8000; ++t) {
    const auto a = inst.sample(rng);
    if (a.branch == pifam::Branch::kD2) {
      ++d2;
      EXPECT_TRUE(a.explicit_elements.empty());
    } else {
      EXPECT_EQ(a.explicit_elements.size(), 3u);
    }
  }
  EXPECT_NEAR(d2 / 8000.0, 0.125, 0.02);
}

TEST(CrsInstanceTest, PolytopeHolds) {
  const CrsInstance inst(3, 4, 2);
  Rng rng(13);
  const auto r = check_polytope(inst, 200, rng);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.sets_checked, 0u);
}

TEST(ProphetLabelsTest, Layout) {
  EXPECT_EQ(prophet_label_count(16, 2), 12u);
  EXPECT_EQ(prophet_label_count(256, 4), 240u);
  EXPECT_EQ(level_labels(16, 1), (std::pair<std::uint32_t, std::uint32_t>{1, 8}));
  EXPECT_EQ(level_labels(16, 2), (std::pair<std::uint32_t, std::uint32_t>{9, 12}));
  EXPECT_EQ(level_of_label(16, 2, 8), 1u);
  EXPECT_EQ(level_of_label(16, 2, 9), 2u);
  EXPECT_THROW(level_of_label(16, 2, 13), PreconditionError);
  EXPECT_THROW(level_of_label(16, 2, 0), PreconditionError);
  const auto m = prophet_matroid(16, 2);
  EXPECT_EQ(m.d(), 32u);
  EXPECT_EQ(m.copies(), 12u);
}

TEST(ProphetInstanceTest, ConditionedSampleIsDOneAndFullRank) {
  Rng rng(14);
  ProphetOptions opt;
  opt.condition_on_e_hard = true;
  const auto s = sample_prophet_instance(16, 2, rng, opt);
  EXPECT_TRUE(s.e_hard);
  EXPECT_FALSE(s.off_grid);
  EXPECT_EQ(gf::matrix_rank(s.r_matrix()), 16u);
  ASSERT_EQ(s.candidates.size(), 12u);
  for (const auto& c : s.candidates) {
    EXPECT_EQ(s.weight_of(c.element), c.weight);
    EXPECT_EQ(c.weight, c.level == 1 ? 2.0 : 4.0);
    EXPECT_EQ(level_of_label(16, 2, c.element.label), c.level);
  }
  for (std::size_t i = 1; i < s.candidates.size(); ++i) {
    EXPECT_LE(s.candidates[i - 1].level, s.candidates[i].level);
  }
  const auto& cols = s.level_columns[0];
  gf::Vector expect(32, 2);
  for (auto coord : s.nested.column_support(1, 0)) expect += s.r_columns[coord];
  EXPECT_EQ(cols[0], expect);
}

TEST(ProphetInstanceTest, OffGridFlag) {
  Rng rng(15);
  EXPECT_TRUE(sample_prophet_instance(32, 2, rng).off_grid);
  EXPECT_FALSE(sample_prophet_instance(4, 1, rng).off_grid);
}

TEST(ProphetInstanceTest, AbsentElementHasZeroWeight) {
  Rng rng(16);
  ProphetOptions opt;
  opt.condition_on_e_hard = true;
  const auto s = sample_prophet_instance(16, 2, rng, opt);
  auto e = s.candidates.front().element;
  e.vector += gf::Vector::unit(32, 0, 2);
  EXPECT_EQ(s.weight_of(e), 0.0);
}

TEST(ProphetInstanceTest, JsonHasFields) {
  Rng rng(17);
  const auto s = sample_prophet_instance(4, 1, rng);
  const auto j = to_json(s);
  EXPECT_NE(j.find("\"kappa\""), std::string::npos);
  EXPECT_NE(j.find("\"weights\""), std::string::npos);
}

TEST(WeightIndependenceTest, ExactKappaOne) {
  const auto r = exact_weight_check(2, 1);
  EXPECT_EQ(r.max_marginal_deviation, 0);
  EXPECT_EQ(r.max_target_deviation, 0);
  EXPECT_EQ(r.max_product_deviation, 0);
  EXPECT_GT(r.pairs, 0u);
}

TEST(WeightIndependenceTest, SampledPasses) {
  Rng rng(18);
  const auto r = pairwise_weight_test(16, 2, 20000, rng);
  EXPECT_EQ(r.case1_violations, 0u);
  EXPECT_FALSE(r.pairs.empty());
  EXPECT_TRUE(r.passed());
}

TEST(WeightIndependenceTest, Preconditions) {
  Rng rng(19);
  EXPECT_THROW(pairwise_weight_test(24, 2, 100, rng), PreconditionError);
  EXPECT_THROW(pairwise_weight_test(4, 2, 100, rng), PreconditionError);
}

}  // namespace
}  // namespace pwsel::instances
