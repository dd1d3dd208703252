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


#ifndef PWSEL_INSTANCES_HPP_
#define PWSEL_INSTANCES_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pwsel/gf.hpp"
#include "pwsel/matroid.hpp"
#include "pwsel/pifam.hpp"
#include "pwsel/rng.hpp"

namespace pwsel::instances {

using pifam::Rational;

// Active-set distribution over GF(q)^d x [d].
class CrsInstance {
 public:
  CrsInstance(std::uint64_t q, std::size_t d, std::size_t c);

  gf::Residue q() const { return matroid_.q(); }
  std::size_t d() const { return matroid_.d(); }
  std::size_t c() const { return c_; }
  const matroid::DuplicatedLinearMatroid& matroid() const { return matroid_; }
  const gf::FieldMatrix& sigma() const { return sigma_; }
  const std::vector<std::uint32_t>& labels() const { return labels_; }
  // q^d, or 0 when it does not fit in 63 bits.
  std::uint64_t class_size() const { return class_size_; }

  pifam::ActiveSet sample(Rng& rng, pifam::MixtureWeight weight = {}) const;
  // The D1 branch alone: columns of R * sigma with labels 1..d.
  std::vector<matroid::LabeledVector> sample_d1(Rng& rng) const;

  // d (1 - q^-d) + q^-d * d: the stratified E|A|.
  Rational expected_size() const;

 private:
  matroid::DuplicatedLinearMatroid matroid_;
  std::size_t c_;
  gf::FieldMatrix sigma_;
  std::vector<gf::Vector> sigma_columns_;
  std::vector<std::uint32_t> labels_;
  std::uint64_t class_size_;
};

pifam::ActiveSet sample_crs_instance(std::uint64_t q, std::size_t d, std::size_t c, Rng& rng);

struct PolytopeReport {
  std::size_t sets_checked = 0;
  std::vector<std::string> violations;
  std::vector<std::string> known_exceptions;
  bool passed() const { return violations.empty(); }
};

// mu(S) = |S| / q^d <= Rank(S) on random subsets, random flats x all labels and
// the whole ground set.
PolytopeReport check_polytope(const CrsInstance& instance, std::size_t subset_trials, Rng& rng);

// ---------------------------------------------------------------------------
// Prophet instance on GF(2)^{2d} x [n].

std::size_t prophet_label_count(std::size_t d, std::size_t kappa);
// Inclusive 1-based label range of a level.
std::pair<std::uint32_t, std::uint32_t> level_labels(std::size_t d, std::size_t level);
std::size_t level_of_label(std::size_t d, std::size_t kappa, std::uint32_t label);
matroid::DuplicatedLinearMatroid prophet_matroid(std::size_t d, std::size_t kappa);

struct Candidate {
  matroid::LabeledVector element;
  std::uint32_t level = 0;
  double weight = 0.0;
};

struct ProphetOptions {
  bool condition_on_e_hard = false;
  bool compute_e_hard = true;
  std::uint64_t max_rejections = 1000000;
  pifam::MixtureWeight weight;
};

struct ProphetSample {
  std::size_t d = 0;
  std::size_t kappa = 0;
  std::size_t n = 0;
  bool e_hard = false;
  bool off_grid = false;  // d != 2^(2 kappa)
  std::uint64_t rejections = 0;
  // Nonzero-weight elements in arrival order: level, then label, then vector.
  std::vector<Candidate> candidates;
  pifam::NestedSigma nested;
  std::vector<gf::Vector> r_columns;                // R in GF(2)^{2d x d}, by column
  std::vector<std::vector<gf::Vector>> level_columns;  // X_l = R Sigma_l, by column
  std::vector<pifam::Branch> branches;
  std::vector<std::vector<std::uint32_t>> full_blocks;

  gf::FieldMatrix r_matrix() const;
  double weight_of(const matroid::LabeledVector& e) const;
};

ProphetSample sample_prophet_instance(std::size_t d, std::size_t kappa, Rng& rng,
                                      const ProphetOptions& options = {});

std::string to_json(const ProphetSample& sample);

// ---------------------------------------------------------------------------
// Pairwise weight independence.

struct PairTest {
  std::uint32_t label_a = 0;
  std::uint32_t label_b = 0;
  std::size_t level_a = 0;
  std::size_t level_b = 0;
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  bool rejected = false;
};

struct WeightTestReport {
  std::uint64_t trials = 0;
  std::uint64_t case1_violations = 0;
  double alpha = 0.01;
  double corrected_alpha = 0.0;
  std::vector<PairTest> pairs;
  std::size_t rejected = 0;
  bool passed() const { return case1_violations == 0 && rejected == 0; }
};

struct WeightTestOptions {
  std::size_t pairs_per_case = 10;
  double alpha = 0.01;
  std::size_t prefix_bits = 2;
  std::size_t threads = 1;
};

// Samples label pairs at the same level and across levels, then runs a
// contingency chi-square on the prefix of the vector each label carries.
WeightTestReport pairwise_weight_test(std::size_t d, std::size_t kappa, std::uint64_t trials,
                                      Rng& rng, const WeightTestOptions& options = {});

// Full enumeration of R for kappa = 1 (Sigma is then fixed); d * 2d <= 24.
pifam::ExactMixtureReport exact_weight_check(std::size_t d, std::size_t kappa,
                                             pifam::MixtureWeight weight = {});

}  // namespace pwsel::instances

#endif  // PWSEL_INSTANCES_HPP_
