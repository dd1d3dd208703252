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

#include "pwsel/gf.hpp"

#include <vector>

#include <gtest/gtest.h>

#include "pwsel/stats.hpp"

namespace pwsel::gf {
namespace {

TEST(FieldTest, SmallFieldArithmetic) {
  const FieldElement two(2, 5), three(3, 5), four(4, 5);
  EXPECT_EQ(field_arithmetic(two, four, FieldOp::kAdd).value(), 1u);
  EXPECT_EQ(field_arithmetic(three, four, FieldOp::kMul).value(), 2u);
  EXPECT_EQ(field_arithmetic(two, two, FieldOp::kInv).value(), 3u);
  EXPECT_EQ(field_arithmetic(two, four, FieldOp::kSub).value(), 3u);
}

TEST(FieldTest, InverseOfZeroAndBadModulus) {
  EXPECT_THROW(FieldElement(0, 5).inverse(), PreconditionError);
  EXPECT_THROW(FieldElement(1, 4), PreconditionError);
  EXPECT_THROW(FieldElement(1, 1), PreconditionError);
  EXPECT_THROW(FieldElement(2, 3) + FieldElement(2, 5), PreconditionError);
}

TEST(FieldTest, EveryNonzeroHasInverse) {
  for (Residue q : {2u, 3u, 5u, 7u, 101u, 65537u}) {
    for (Residue a = 1; a < std::min<Residue>(q, 500); ++a) {
      ASSERT_EQ(mul_mod(a, inv_mod(a, q), q), 1u) << a << " mod " << q;
    }
  }
}

TEST(FieldTest, LargePrimeNoOverflow) {
  const Residue q = 2147483647u;
  EXPECT_EQ(mul_mod(q - 1, q - 1, q), 1u);
  EXPECT_EQ(add_mod(q - 1, q - 1, q), q - 2);
}

TEST(FieldTest, CheckedPow) {
  EXPECT_EQ(checked_pow(5, 5), 3125u);
  EXPECT_EQ(checked_pow(2, 62), 1ULL << 62);
  EXPECT_EQ(checked_pow(2, 64), 0u);
}

TEST(VectorTest, PackedAndWideAgree) {
  Rng rng(1);
  for (std::size_t dim : {1u, 63u, 64u, 65u, 130u}) {
    auto v = Vector::random(dim, 2, rng);
    auto w = Vector::random(dim, 2, rng);
    auto sum = v;
    sum += w;
    for (std::size_t i = 0; i < dim; ++i) ASSERT_EQ(sum.get(i), v.get(i) ^ w.get(i));
    auto twice = v;
    twice += v;
    EXPECT_TRUE(twice.is_zero());
  }
}

TEST(VectorTest, IndexRoundTrip) {
  for (std::uint64_t i = 0; i < 125; ++i) {
    const auto v = Vector::from_index(i, 3, 5);
    ASSERT_EQ(v.index(), i);
  }
  EXPECT_EQ(Vector::from_values({1, 0, 0}, 2).index(), 4u);
  EXPECT_THROW(Vector(80, 2).index(), PreconditionError);
}

TEST(VectorTest, OrderingIsLexicographic) {
  const auto a = Vector::from_values({0, 1, 1}, 2);
  const auto b = Vector::from_values({1, 0, 0}, 2);
  EXPECT_LT(a, b);
  const auto c = Vector::from_values({0, 4}, 5);
  const auto d = Vector::from_values({1, 0}, 5);
  EXPECT_LT(c, d);
}

TEST(VectorTest, AddScaledAndWeight) {
  auto v = Vector::from_values({1, 2, 3}, 5);
  v.add_scaled(Vector::from_values({1, 1, 1}, 5), 2);
  EXPECT_EQ(v.values(), (std::vector<Residue>{3, 4, 0}));
  EXPECT_EQ(v.weight(), 2u);
  EXPECT_THROW(v.add_scaled(Vector(4, 5), 1), PreconditionError);
}

TEST(MatrixRankTest, KnownValues) {
  EXPECT_EQ(matrix_rank(FieldMatrix::identity(4, 2)), 4u);
  EXPECT_EQ(matrix_rank(FieldMatrix(3, 5, 3)), 0u);
  EXPECT_EQ(matrix_rank(FieldMatrix::from_rows({{1, 1}, {1, 1}}, 2)), 1u);
}

TEST(MatrixRankTest, InvertibleByRowOperations) {
  Rng rng(77);
  for (std::uint64_t q : {2u, 3u, 7u}) {
    for (std::size_t n : {1u, 5u, 70u}) {
      // Identity with random row additions stays invertible.
      auto rows = FieldMatrix::identity(n, q).to_rows();
      for (int step = 0; step < 200; ++step) {
        const auto i = rng.uniform_below(n), j = rng.uniform_below(n);
        if (i == j) continue;
        const auto f = static_cast<Residue>(rng.uniform_below(q));
        for (std::size_t c = 0; c < n; ++c) {
          rows[i][c] = add_mod(rows[i][c], mul_mod(f, rows[j][c], static_cast<Residue>(q)),
                               static_cast<Residue>(q));
        }
      }
      EXPECT_EQ(matrix_rank(FieldMatrix::from_rows(rows, q)), n);
    }
  }
}

TEST(MatrixMultiplyTest, KnownValues) {
  EXPECT_EQ(matrix_multiply(FieldMatrix::from_rows({{1, 1}}, 2), FieldMatrix::from_rows({{1}, {1}}, 2)),
            FieldMatrix::from_rows({{0}}, 2));
  EXPECT_EQ(matrix_multiply(FieldMatrix::from_rows({{2, 3}}, 5), FieldMatrix::from_rows({{1}, {4}}, 5)),
            FieldMatrix::from_rows({{4}}, 5));
  Rng rng(3);
  const auto b = random_matrix(4, 6, 3, rng);
  EXPECT_EQ(matrix_multiply(FieldMatrix::identity(4, 3), b), b);
  EXPECT_THROW(matrix_multiply(b, b), PreconditionError);
}

TEST(MatrixMultiplyTest, PackedPathMatchesDefinition) {
  Rng rng(8);
  const auto a = random_matrix(70, 40, 2, rng);
  const auto b = random_matrix(40, 9, 2, rng);
  const auto c = matrix_multiply(a, b);
  for (std::size_t i = 0; i < 70; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      Residue s = 0;
      for (std::size_t k = 0; k < 40; ++k) s ^= a.at(i, k) & b.at(k, j);
      ASSERT_EQ(c.at(i, j), s);
    }
  }
}

TEST(RandomMatrixTest, SameSeedSameMatrix) {
  Rng a(5), b(5);
  EXPECT_EQ(random_matrix(7, 9, 5, a), random_matrix(7, 9, 5, b));
}

TEST(RandomMatrixTest, FullRankProbability) {
  Rng rng(99);
  constexpr int kDraws = 100000;
  int full = 0;
  for (int i = 0; i < kDraws; ++i) full += matrix_rank(random_matrix(8, 3, 2, rng)) == 3;
  const auto e = stats::Estimate::proportion(full, kDraws, 3.0);
  EXPECT_GE(e.ci_high, 1.0 - 1.0 / 32.0);
}

TEST(RandomMatrixTest, EntriesUniform) {
  Rng rng(4);
  std::vector<std::uint64_t> counts(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_matrix(10, 10, 5, rng);
    for (auto x : m.entries()) ++counts[x];
  }
  const std::vector<double> p(5, 0.2);
  EXPECT_GT(stats::chi_square_gof(counts, p).p_value, 1e-4);
}

TEST(LinearBasisTest, SpanMembership) {
  LinearBasis b(3, 2);
  EXPECT_TRUE(b.insert(Vector::from_values({1, 0, 0}, 2)));
  EXPECT_TRUE(b.insert(Vector::from_values({0, 1, 0}, 2)));
  EXPECT_FALSE(b.insert(Vector::from_values({1, 1, 0}, 2)));
  EXPECT_TRUE(b.in_span(Vector::from_values({1, 1, 0}, 2)));
  EXPECT_FALSE(b.in_span(Vector::from_values({0, 0, 1}, 2)));
  EXPECT_TRUE(b.in_span(Vector(3, 2)));
  EXPECT_EQ(b.rank(), 2u);
  b.clear();
  EXPECT_EQ(b.rank(), 0u);
}

TEST(LinearBasisTest, AgreesWithMatrixRank) {
  Rng rng(12);
  for (std::uint64_t q : {2u, 3u, 11u}) {
    for (int t = 0; t < 50; ++t) {
      const auto m = random_matrix(6, 4, q, rng);
      LinearBasis b(4, static_cast<Residue>(q));
      for (std::size_t r = 0; r < 6; ++r) b.insert(m.row(r));
      ASSERT_EQ(b.rank(), matrix_rank(m));
    }
  }
}

}  // namespace
}  // namespace pwsel::gf
