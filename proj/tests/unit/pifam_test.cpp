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

#include "pwsel/pifam.hpp"

#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "pwsel/stats.hpp"

namespace pwsel::pifam {
namespace {

gf::FieldMatrix small_sigma() {
  return gf::FieldMatrix::from_rows({{1, 0, 1}, {0, 1, 1}}, 2);
}

// All R in GF(2)^{3x2}; X = R sigma.
std::vector<gf::FieldMatrix> all_products(const gf::FieldMatrix& sigma, std::size_t d) {
  std::vector<gf::FieldMatrix> out;
  const std::size_t m = sigma.rows();
  for (std::uint64_t t = 0; t < (1ULL << (d * m)); ++t) {
    gf::FieldMatrix r(d, m, 2);
    for (std::size_t i = 0; i < d * m; ++i) r.set(i / m, i % m, (t >> i) & 1);
    out.push_back(gf::matrix_multiply(r, sigma));
  }
  return out;
}

TEST(OrderedFamilyTest, ExactMarginalsAndPairs) {
  const auto xs = all_products(small_sigma(), 3);
  ASSERT_EQ(xs.size(), 64u);
  for (std::size_t i = 0; i < 3; ++i) {
    std::map<std::uint64_t, int> marginal;
    for (const auto& x : xs) ++marginal[x.column(i).index()];
    ASSERT_EQ(marginal.size(), 8u);
    for (auto [v, n] : marginal) EXPECT_EQ(n, 8) << "column " << i;  // 8 / 64 = 1/8
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      std::map<std::pair<std::uint64_t, std::uint64_t>, int> joint;
      for (const auto& x : xs) ++joint[{x.column(i).index(), x.column(j).index()}];
      ASSERT_EQ(joint.size(), 64u);
      for (auto [v, n] : joint) EXPECT_EQ(n, 1);  // 1 / 64
    }
  }
}

TEST(OrderedFamilyTest, SingleColumnUniform) {
  const auto xs = all_products(gf::FieldMatrix::from_rows({{1}, {0}}, 2), 3);
  std::map<std::uint64_t, int> marginal;
  for (const auto& x : xs) ++marginal[x.column(0).index()];
  ASSERT_EQ(marginal.size(), 8u);
  for (auto [v, n] : marginal) EXPECT_EQ(n, 8);
}

TEST(OrderedFamilyTest, ProductAndPreconditions) {
  Rng rng(1);
  const auto f = ordered_family(small_sigma(), 4, rng);
  EXPECT_EQ(f.X, gf::matrix_multiply(f.R, f.sigma));
  EXPECT_EQ(f.X.rows(), 4u);
  EXPECT_EQ(f.X.cols(), 3u);
  EXPECT_THROW(ordered_family(small_sigma(), 1, rng), PreconditionError);
  const auto back = ordered_family_from_json(to_json(f));
  EXPECT_EQ(back.X, f.X);
  EXPECT_EQ(back.R, f.R);
}

TEST(OrderedFamilyTest, KWiseIndependence) {
  EXPECT_TRUE(columns_kwise_independent(small_sigma(), 2));
  EXPECT_FALSE(columns_kwise_independent(small_sigma(), 3));
}

TEST(SigmaCrsTest, KnownValues) {
  const auto s = sigma_crs(3, 2, 4);
  EXPECT_EQ(s, gf::FieldMatrix::from_rows({{0, 1, 1, 1}, {1, 0, 1, 2}}, 3));
  EXPECT_EQ(projective_count(3, 2), 4u);
  EXPECT_THROW(sigma_crs(2, 1, 2), PreconditionError);
  EXPECT_TRUE(columns_kwise_independent(sigma_crs(5, 2, 5), 2));
}

TEST(PairwiseUniformTest, EveryPairExactlyUniform) {
  const PairwiseUniform f(7, 8);
  for (std::uint64_t seed = 0; seed < 20000; ++seed) {
    Rng rng(seed);
    const auto x = f.sample(rng);
    ASSERT_EQ(x.size(), 8u);
    for (auto v : x) ASSERT_LT(v, 7u);
  }
  // Exactness: the map (r0, r1) -> (x_i, x_j) is a bijection for i != j.
  const auto cols = projective_columns(7, 2, 8);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = i + 1; j < 8; ++j) {
      std::map<std::pair<gf::Residue, gf::Residue>, int> seen;
      for (gf::Residue r0 = 0; r0 < 7; ++r0) {
        for (gf::Residue r1 = 0; r1 < 7; ++r1) {
          auto xi = gf::add_mod(gf::mul_mod(r0, cols[i].get(0), 7), gf::mul_mod(r1, cols[i].get(1), 7), 7);
          auto xj = gf::add_mod(gf::mul_mod(r0, cols[j].get(0), 7), gf::mul_mod(r1, cols[j].get(1), 7), 7);
          ++seen[{xi, xj}];
        }
      }
      ASSERT_EQ(seen.size(), 49u);
    }
  }
  EXPECT_THROW(PairwiseUniform(7, 9), PreconditionError);
}

TEST(MatrixToSetTest, EmptyLabels) {
  Rng rng(2);
  const std::vector<gf::Vector> none;
  const std::vector<std::uint32_t> labels;
  EXPECT_TRUE(matrix_to_set(std::span<const gf::Vector>(none), labels, rng).empty());
}

TEST(MatrixToSetTest, Preconditions) {
  Rng rng(2);
  const std::vector<gf::Vector> cols(4, gf::Vector(2, 2));
  const std::vector<std::uint32_t> labels = {1, 2, 3, 4};
  EXPECT_THROW(matrix_to_set(std::span<const gf::Vector>(cols), labels, rng), PreconditionError);
  const std::vector<gf::Vector> three(3, gf::Vector(2, 2));
  const std::vector<std::uint32_t> bad = {0, 1, 2};
  EXPECT_THROW(matrix_to_set(std::span<const gf::Vector>(three), bad, rng), PreconditionError);
}

TEST(MatrixToSetTest, ExactMixtureQ2D2) {
  // Unordered family: tapes are all R in GF(2)^{2x2} with sigma the 2x2 identity.
  std::vector<std::vector<gf::Vector>> tapes;
  for (std::uint64_t t = 0; t < 16; ++t) {
    tapes.push_back({gf::Vector::from_values({static_cast<gf::Residue>(t & 1), static_cast<gf::Residue>(t >> 1 & 1)}, 2),
                     gf::Vector::from_values({static_cast<gf::Residue>(t >> 2 & 1), static_cast<gf::Residue>(t >> 3 & 1)}, 2)});
  }
  const std::vector<std::uint32_t> labels = {1, 2}, groups = {0, 0};
  const auto r = exact_mixture_deviation(tapes, labels, groups);
  EXPECT_EQ(r.max_marginal_deviation, 0);
  EXPECT_EQ(r.max_target_deviation, 0);
  EXPECT_EQ(r.max_product_deviation, 0);
  const auto bad = exact_mixture_deviation(tapes, labels, groups, MixtureWeight{2});
  EXPECT_GT(bad.max_target_deviation, 0);
}

TEST(MatrixToSetTest, BranchFrequency) {
  Rng rng(5);
  const std::vector<gf::Vector> cols = {gf::Vector::from_values({1, 0}, 2)};
  const std::vector<std::uint32_t> labels = {1};
  int d2 = 0;
  constexpr int kTrials = 40000;
  for (int i = 0; i < kTrials; ++i) {
    d2 += matrix_to_set(std::span<const gf::Vector>(cols), labels, rng).branch == Branch::kD2;
  }
  const auto e = stats::Estimate::proportion(d2, kTrials);
  EXPECT_LE(e.ci_low, 0.25);
  EXPECT_GE(e.ci_high, 0.25);
}

TEST(RareEventTest, HugeExponentStillExact) {
  Rng rng(3);
  int hits = 0;
  for (int i = 0; i < 20000; ++i) hits += rare_event(2, 200, 1, rng);
  EXPECT_EQ(hits, 0);
  int halves = 0;
  for (int i = 0; i < 20000; ++i) halves += rare_event(2, 1, 1, rng);
  EXPECT_NEAR(halves / 20000.0, 0.5, 0.015);
}

TEST(SigmaProphetTest, LevelSizes) {
  Rng rng(10);
  const auto ns = sigma_prophet(64, 3, rng);
  EXPECT_EQ(ns.basis(1).size(), 64u);
  EXPECT_EQ(ns.basis(2).size(), 32u);
  EXPECT_EQ(ns.basis(3).size(), 16u);
  EXPECT_EQ(ns.num_columns(1), 32u);
  EXPECT_EQ(ns.num_columns(2), 16u);
  EXPECT_EQ(ns.num_columns(3), 8u);
  EXPECT_EQ(ns.sigma(3).cols(), 8u);
}

TEST(SigmaProphetTest, LevelThreeColumnIsWindowOfFour) {
  Rng rng(10);
  const auto ns = sigma_prophet(64, 3, rng);
  for (std::size_t j = 0; j < ns.partitions[2].size(); ++j) {
    const auto& part = ns.partitions[2][j];
    ASSERT_EQ(part.size(), 8u);
    const std::size_t first = j * 4;
    ASSERT_EQ(ns.part_of_column(3, first), j);
    gf::Vector expect(64, 2);
    for (std::size_t k = 0; k < 4; ++k) expect.set(part[k], 1);
    EXPECT_EQ(ns.column(3, first), expect);
  }
}

TEST(SigmaProphetTest, Preconditions) {
  Rng rng(1);
  EXPECT_THROW(sigma_prophet(48, 2, rng), PreconditionError);
  EXPECT_THROW(sigma_prophet(4, 3, rng), PreconditionError);
  EXPECT_THROW(sigma_prophet(16, 0, rng), PreconditionError);
}

TEST(NestedPropertiesTest, StructureHoldsAcrossSeeds) {
  for (std::size_t kappa : {1u, 2u, 3u}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng rng(s);
      const auto ns = sigma_prophet(std::size_t{1} << (2 * kappa), kappa, rng);
      const auto r = check_nested_structure(ns);
      ASSERT_TRUE(r.passed()) << r.violations.front();
    }
  }
}

TEST(NestedPropertiesTest, KappaTwoHalfContinuations) {
  Rng rng(4);
  const auto ns = sigma_prophet(16, 2, rng);
  const auto r = check_nested_properties(ns, 10000, rng);
  ASSERT_EQ(r.frequencies.size(), 1u);
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(static_cast<double>(r.frequencies[0].hits) / 10000, 0.5, 0.015);
}

TEST(NestedPropertiesTest, KappaOneVacuous) {
  Rng rng(4);
  const auto ns = sigma_prophet(4, 1, rng);
  const auto r = check_nested_properties(ns, 100, rng);
  EXPECT_TRUE(r.frequencies.empty());
  EXPECT_TRUE(r.passed());
}

TEST(NestedPropertiesTest, CorruptedPartitionDetected) {
  Rng rng(4);
  auto ns = sigma_prophet(16, 2, rng);
  std::swap(ns.partitions[1][0][0], ns.partitions[0][0][0]);
  ns.partitions[1][0][0] = ns.partitions[1][0][1];
  EXPECT_FALSE(check_nested_structure(ns).passed());
}

TEST(NestedJsonTest, RoundTrip) {
  Rng rng(8);
  const auto ns = sigma_prophet(64, 3, rng);
  const auto back = nested_sigma_from_json(to_json(ns));
  EXPECT_EQ(back.partitions, ns.partitions);
  EXPECT_EQ(back.sigma(2), ns.sigma(2));
  EXPECT_THROW(nested_sigma_from_json("{\"d\": 4}"), PreconditionError);
}

TEST(ResampleTest, KeepsPrefixLevels) {
  Rng rng(8);
  const auto ns = sigma_prophet(256, 4, rng);
  const auto cont = resample_after(ns, 2, rng);
  EXPECT_EQ(cont.partitions[0], ns.partitions[0]);
  EXPECT_EQ(cont.partitions[1], ns.partitions[1]);
  EXPECT_TRUE(check_nested_structure(cont).passed());
}

}  // namespace
}  // namespace pwsel::pifam
