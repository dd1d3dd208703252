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


#ifndef PWSEL_VERIFY_HPP_
#define PWSEL_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pwsel/instances.hpp"
#include "pwsel/matroid.hpp"
#include "pwsel/parallel.hpp"
#include "pwsel/pifam.hpp"
#include "pwsel/rng.hpp"
#include "pwsel/schemes.hpp"
#include "pwsel/stats.hpp"

namespace pwsel::verify {

using stats::Accumulator;
using stats::Estimate;
using stats::PairAccumulator;
using pifam::Rational;

struct RunOptions {
  std::size_t threads = 1;
  double z = 3.0;
};

// ---------------------------------------------------------------------------
// Exact checks

enum class Construction { kOrdered, kUnordered };

struct ExactParams {
  std::uint64_t q = 2;
  std::size_t m = 2;
  std::size_t n = 3;
  std::size_t d = 3;
  pifam::MixtureWeight weight;
  // Mutation: the last column of sigma repeats the first.
  bool duplicate_sigma_column = false;
};

struct ExactReport {
  Rational max_deviation;           // joint vs product of marginals
  Rational max_marginal_deviation;  // marginal vs q^-d
  Rational max_target_deviation;    // joint vs q^-2d
  std::uint64_t tapes = 0;
  std::size_t pairs = 0;
};

inline constexpr std::uint64_t kMaxExactTapes = std::uint64_t{1} << 24;

ExactReport exact_pairwise_check(Construction construction, const ExactParams& params);

// ---------------------------------------------------------------------------
// CRS hardness

struct CrsGapReport {
  std::size_t q = 0, d = 0, c = 0;
  Estimate rank_d1;         // E[Rank | D1], sampled
  double rank_d2 = 0.0;     // E[Rank | D2], exact
  Estimate rank;            // stratified E[Rank(A)]
  Rational expected_size;   // exact E|A|
  Estimate ratio;           // E[Rank] / E|A|
  double bound = 0.0;       // (c + 1) / d
  bool vacuous = false;
  std::uint64_t d1_rank_violations = 0;  // samples with Rank > c under D1
  Estimate naive_rank;                   // unstratified cross-check
  bool naive_agrees = true;
};

CrsGapReport crs_hardness_gap(std::uint64_t q, std::size_t d, std::size_t c, std::uint64_t trials,
                              Rng& rng, const RunOptions& options = {},
                              std::uint64_t naive_trials = 0);

// ---------------------------------------------------------------------------
// Balance certificate

template <class Element>
struct Family {
  std::string description;
  std::function<bool(const Element&)> contains;
};

struct FamilyResult {
  std::string description;
  Estimate ratio;
  Estimate rank;
  Estimate size;
  bool tested = true;  // false when A and F never met
};

struct CertifierReport {
  std::vector<FamilyResult> families;
  FamilyResult min_ratio;
  double target = 0.0;
  bool pass = true;
};

// For each family F, E[Rank(A n F)] / E[|A n F|]; fails when any CI upper bound is below c.
template <matroid::Matroid M>
CertifierReport certify_balance(
    const std::function<std::vector<typename M::Element>(Rng&)>& sampler, const M& m,
    double target, const std::vector<Family<typename M::Element>>& families,
    std::uint64_t trials, Rng& rng, const RunOptions& options = {}) {
  using Element = typename M::Element;
  const Rng base = rng.derive("certify");
  auto acc = run_trials(
      trials, options.threads, std::vector<PairAccumulator>(families.size()),
      [&](std::vector<PairAccumulator>& st, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto active = sampler(tr);
        std::vector<Element> hit;
        for (std::size_t f = 0; f < families.size(); ++f) {
          hit.clear();
          for (const auto& e : active) {
            if (families[f].contains(e)) hit.push_back(e);
          }
          st[f].add(static_cast<double>(m.rank(std::span<const Element>(hit))),
                    static_cast<double>(hit.size()));
        }
      },
      [](std::vector<PairAccumulator>& into, const std::vector<PairAccumulator>& from) {
        for (std::size_t f = 0; f < into.size(); ++f) into[f].merge(from[f]);
      });
  CertifierReport report;
  report.target = target;
  bool have_min = false;
  for (std::size_t f = 0; f < families.size(); ++f) {
    FamilyResult r;
    r.description = families[f].description;
    const auto& a = acc[f];
    r.tested = a.sy > 0.0;
    r.ratio = Estimate::ratio(a, options.z);
    Accumulator rank{a.count, a.sx, a.sxx}, size{a.count, a.sy, a.syy};
    r.rank = Estimate::from(rank, options.z);
    r.size = Estimate::from(size, options.z);
    if (r.tested) {
      if (r.ratio.ci_high < target) report.pass = false;
      if (!have_min || r.ratio.mean < report.min_ratio.ratio.mean) {
        report.min_ratio = r;
        have_min = true;
      }
    }
    report.families.push_back(std::move(r));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Disjunction bound

struct DisjunctionReport {
  std::vector<Estimate> marginals;
  Estimate pr_or;
  double lemma_bound = 0.0;     // sum p / (1 + sum p)
  double independent_or = 0.0;  // 1 - prod (1 - p)
  double product_bound = 0.0;   // independent_or / 1.299
  bool lemma_holds = true;
  bool product_holds = true;
};

double disjunction_lower_bound(const std::vector<double>& p);

DisjunctionReport disjunction_bound_check(const std::vector<double>& p,
                                          const std::function<std::vector<bool>(Rng&)>& sampler,
                                          std::uint64_t trials, Rng& rng,
                                          const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Prophet hardness

struct PolicyResult {
  std::string name;
  Estimate reward;
};

struct ProphetGapReport {
  std::size_t d = 0, kappa = 0;
  bool off_grid = false;  // d != 2^(2 kappa)
  std::uint64_t rejections = 0;
  Estimate prophet;
  double stated_prophet_bound = 0.0;  // kappa d / 10
  double proof_prophet_bound = 0.0;   // kappa d / 4
  double gambler_bound = 0.0;         // 2 d
  std::vector<PolicyResult> policies;
  std::size_t best_policy = 0;
  double ratio = 0.0;                 // best policy mean / prophet mean
  double ratio_bound = 0.0;           // 10 / kappa
};

struct ProphetGapOptions {
  std::size_t threads = 1;
  double z = 3.0;
  // Auxiliary samples for the bucketing member of the suite; 0 leaves it out.
  std::size_t bucketing_aux = 0;
};

ProphetGapReport prophet_hardness_gap(std::size_t d, std::size_t kappa, std::uint64_t trials,
                                      Rng& rng, const ProphetGapOptions& options = {});

struct BucketingReport {
  std::size_t d = 0, kappa = 0, k = 0, rank = 0;
  double opt_estimate = 0.0;
  double opt_std_error = 0.0;
  std::size_t best_bucket = 0;
  std::vector<double> bucket_opt;
  Estimate reward;
  Estimate prophet;
  double bound = 0.0;  // OPT / (4 (k + 1))
  bool pass = false;
};

BucketingReport bucketing_gap(std::size_t d, std::size_t kappa, std::uint64_t trials,
                              std::size_t aux_samples, Rng& rng, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Nested sigma properties

struct SigmaLevelReport {
  std::size_t kappa = 0, d = 0, seeds = 0;
  std::size_t structure_failures = 0;          // seeds failing (i), (ii), (iv) or sizes
  std::vector<pifam::LevelPairFrequency> frequencies;  // (iii), pooled over seeds
  std::vector<std::string> violations;
};

struct SigmaPropsReport {
  std::vector<SigmaLevelReport> levels;
  bool pass = true;
};

// d = 2^(2 kappa) per kappa; continuations are split evenly across seeds and pooled.
SigmaPropsReport sigma_properties(const std::vector<std::size_t>& kappas, std::size_t seeds,
                                  std::size_t continuations, Rng& rng, double z = 3.0);

// ---------------------------------------------------------------------------
// Prophet benchmarks on pairwise-independent weights

struct ProphetRatioReport {
  std::string name;
  Estimate gambler;
  Estimate prophet;
  Estimate ratio;  // E[gambler] / E[prophet]
  double target = 0.0;
  std::size_t thresholds = 0;  // distinct calibrated thresholds
  bool pass = false;
};

// Weight of element i is x_i + 1 with x from PairwiseUniform(q, n).
struct PairwiseWeights {
  std::uint64_t q = 101;
  std::vector<double> scale;  // per-element multiplier; empty means 1
};

// Rank-one matroid on n elements, median-of-maximum threshold from `aux` samples.
ProphetRatioReport single_choice_benchmark(std::size_t n, const PairwiseWeights& weights,
                                           std::uint64_t trials, std::size_t aux, Rng& rng,
                                           const RunOptions& options = {});

using TraceFn = std::function<void(std::uint64_t trial, std::uint32_t element, double weight,
                                   bool accepted)>;

// Random vertex-order partition of a graphic matroid, single-choice prophet per part.
ProphetRatioReport graphic_partition_benchmark(const matroid::GraphicMatroid& g,
                                               const PairwiseWeights& weights,
                                               std::uint64_t trials, std::size_t aux, Rng& rng,
                                               const RunOptions& options = {},
                                               const TraceFn& trace = {});

// ---------------------------------------------------------------------------
// Partition matroid certificate

struct PartitionCertificateParams {
  std::size_t parts = 10;
  std::size_t part_size = 10;
  std::uint64_t q = 101;
  std::uint64_t active_below = 10;  // element active iff x_i < active_below
  std::size_t random_subsets = 5;
  std::size_t random_unions = 5;
};

CertifierReport partition_certificate(const PartitionCertificateParams& params, double target,
                                      std::uint64_t trials, Rng& rng,
                                      const RunOptions& options = {});

// CRS instance with materialized blocks; families are the ground set, one class
// per label, random flats across all labels and hashed random subsets.
CertifierReport crs_certificate(const instances::CrsInstance& instance, double target,
                                std::size_t flats, std::size_t subsets, std::uint64_t trials,
                                Rng& rng, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// OCRS balance

struct AdversaryBalance {
  std::string order;
  std::size_t eligible = 0;      // elements with enough active occurrences
  std::size_t insufficient = 0;  // active at least once but below the threshold
  std::size_t loops = 0;         // zero vectors: outside the polytope, reported apart
  double loop_balance = 0.0;     // largest point balance over loops
  std::size_t refuted = 0;       // eligible elements whose CI upper bound is below target
  Estimate min_balance;          // element with the smallest CI lower bound
  std::uint64_t worst_element = 0;
  double min_point = 0.0;
};

struct OcrsBalanceReport {
  double coin_probability = 0.0;
  double target = 0.0;  // 1 / (4 Rank)
  std::vector<AdversaryBalance> adversaries;
  bool pass = true;
};

struct OcrsOptions {
  std::size_t threads = 1;
  double z = 3.0;
  std::uint64_t min_occurrences = 30;
  // Overrides 1 / (2 Rank); 0 gives a scheme that accepts nothing.
  std::optional<double> coin_probability;
  std::vector<schemes::AdversaryOrder> orders = {schemes::AdversaryOrder::kLabelAscending,
                                                 schemes::AdversaryOrder::kLabelDescending,
                                                 schemes::AdversaryOrder::kCoinAware};
};

OcrsBalanceReport ocrs_balance(const instances::CrsInstance& instance, std::uint64_t trials,
                               Rng& rng, const OcrsOptions& options = {});

// Element id used by ocrs_balance: (label - 1) q^d + index(vector).
std::uint64_t element_id(const matroid::LabeledVector& e, std::uint64_t class_size);

// Active set with full blocks expanded into explicit elements.
std::vector<matroid::LabeledVector> materialize(const pifam::ActiveSet& a, std::size_t d,
                                                gf::Residue q);

}  // namespace pwsel::verify

#endif  // PWSEL_VERIFY_HPP_
