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


#ifndef PWSEL_PIFAM_HPP_
#define PWSEL_PIFAM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pwsel/gf.hpp"
#include "pwsel/matroid.hpp"
#include "pwsel/rng.hpp"

namespace pwsel::pifam {

struct OrderedFamily {
  gf::FieldMatrix X;      // d x n
  gf::FieldMatrix sigma;  // m x n
  gf::FieldMatrix R;      // d x m
  std::uint64_t seed = 0;
};

OrderedFamily ordered_family(const gf::FieldMatrix& sigma, std::size_t d, Rng& rng);

// Every k columns are linearly independent. Brute force over k-subsets.
bool columns_kwise_independent(const gf::FieldMatrix& sigma, std::size_t k);

// Number of one-dimensional subspaces of GF(q)^m, saturating at 2^63.
std::uint64_t projective_count(std::uint64_t q, std::size_t m);
// First n vectors of GF(q)^m whose first nonzero coordinate is 1, lexicographically.
std::vector<gf::Vector> projective_columns(std::uint64_t q, std::size_t m, std::size_t n);

gf::FieldMatrix sigma_crs(std::uint64_t q, std::size_t c, std::size_t d);

// n <= q + 1 scalars x_i = r_0 a_i + r_1 b_i over distinct projective columns
// (a_i, b_i) of GF(q)^2; every pair is uniform on GF(q)^2.
class PairwiseUniform {
 public:
  PairwiseUniform(std::uint64_t q, std::size_t n);

  gf::Residue modulus() const { return q_; }
  std::size_t size() const { return a_.size(); }
  std::vector<gf::Residue> sample(Rng& rng) const;

 private:
  gf::Residue q_;
  std::vector<gf::Residue> a_, b_;
};

enum class Branch { kD1, kD2 };

struct ActiveSet {
  std::vector<matroid::LabeledVector> explicit_elements;
  std::vector<std::uint32_t> full_blocks;  // sorted
  Branch branch = Branch::kD1;

  bool contains(const matroid::LabeledVector& e) const;
  bool empty() const { return explicit_elements.empty() && full_blocks.empty(); }
  // |A| when each label class has `class_size` members.
  double cardinality(double class_size) const;
};

// Pr[branch D2] = numerator / q^d. The construction uses numerator 1.
struct MixtureWeight {
  std::uint64_t numerator = 1;
};

// True with probability numerator / q^dim, exactly.
bool rare_event(std::uint64_t q, std::size_t dim, std::uint64_t numerator, Rng& rng);

ActiveSet matrix_to_set(const gf::FieldMatrix& X, std::span<const std::uint32_t> labels, Rng& rng,
                        MixtureWeight weight = {});
// Same procedure on columns given as vectors; all columns share one dimension.
ActiveSet matrix_to_set(std::span<const gf::Vector> columns, std::span<const std::uint32_t> labels,
                        Rng& rng, MixtureWeight weight = {});

std::size_t active_rank(const ActiveSet& a, const matroid::DuplicatedLinearMatroid& m);

using Rational = boost::multiprecision::cpp_rational;

struct ExactMixtureReport {
  Rational max_marginal_deviation;  // |Pr[v^i in A] - q^-D|
  Rational max_target_deviation;    // |Pr[v^i, u^j in A] - q^-2D|
  Rational max_product_deviation;   // |Pr[v^i, u^j in A] - Pr[v^i in A] Pr[u^j in A]|
  std::size_t elements = 0;
  std::size_t pairs = 0;
};

// Exact marginals and pairwise joints of MatrixToSet over equally likely tapes.
// tapes[t][i] is column i under tape t; columns sharing a group id go through
// one MatrixToSet call, different groups through independent calls.
ExactMixtureReport exact_mixture_deviation(std::span<const std::vector<gf::Vector>> tapes,
                                           std::span<const std::uint32_t> labels,
                                           std::span<const std::uint32_t> groups,
                                           MixtureWeight weight = {});

// Nested system over GF(2)^d. Levels are 1-based in the accessors; coordinates are 0-based.
struct NestedSigma {
  std::size_t d = 0;
  std::size_t kappa = 0;
  std::uint64_t seed = 0;
  // partitions[l-1][j] lists the coordinates of part j at level l, ascending.
  std::vector<std::vector<std::vector<std::uint32_t>>> partitions;

  std::vector<std::uint32_t> basis(std::size_t level) const;
  std::size_t num_columns(std::size_t level) const { return d >> level; }
  // Column c of Sigma_level and the part it came from.
  gf::Vector column(std::size_t level, std::size_t c) const;
  std::vector<std::uint32_t> column_support(std::size_t level, std::size_t c) const;
  std::size_t part_of_column(std::size_t level, std::size_t c) const;
  std::vector<gf::Vector> columns(std::size_t level) const;
  gf::FieldMatrix sigma(std::size_t level) const;
};

NestedSigma sigma_prophet(std::size_t d, std::size_t kappa, Rng& rng);
// Keeps levels 1..level and redraws the rest.
NestedSigma resample_after(const NestedSigma& ns, std::size_t level, Rng& rng);

struct LevelPairFrequency {
  std::size_t level = 0;
  std::size_t level_prime = 0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double expected = 0.0;
  bool within_bounds = true;
};

struct NestedReport {
  bool nested_bases = true;      // (i)
  bool full_rank_support = true; // (ii)
  bool level_increase = true;    // (iii)
  bool distinct_columns = true;  // (iv)
  bool part_sizes = true;
  bool column_weights = true;
  std::vector<LevelPairFrequency> frequencies;
  std::vector<std::string> violations;

  bool passed() const { return violations.empty(); }
};

// Deterministic checks of (i), (ii), (iv) on ns.
NestedReport check_nested_structure(const NestedSigma& ns);
// Tracks one random column of each level and counts continuations landing in span(B_l').
std::vector<LevelPairFrequency> level_increase_counts(const NestedSigma& ns,
                                                      std::size_t continuations, Rng& rng);
// 3-sigma binomial check of a pooled count.
bool frequency_within(const LevelPairFrequency& f, double z);
NestedReport check_nested_properties(const NestedSigma& ns, std::size_t continuations, Rng& rng,
                                     double z = 3.0);

std::string to_json(const NestedSigma& ns);
NestedSigma nested_sigma_from_json(std::string_view text);
std::string to_json(const OrderedFamily& family);
OrderedFamily ordered_family_from_json(std::string_view text);

}  // namespace pwsel::pifam

#endif  // PWSEL_PIFAM_HPP_
