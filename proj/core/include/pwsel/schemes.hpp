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


#ifndef PWSEL_SCHEMES_HPP_
#define PWSEL_SCHEMES_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwsel/matroid.hpp"
#include "pwsel/rng.hpp"

namespace pwsel::schemes {

// ---------------------------------------------------------------------------
// Greedy OCRS

double ocrs_coin_probability(std::size_t rank);

// Coins fixed per element id before any order is chosen.
class PrecommittedCoins {
 public:
  PrecommittedCoins(std::uint64_t key, double heads_probability)
      : key_(key), p_(heads_probability) {}
  bool heads(std::uint64_t element_id) const;
  double probability() const { return p_; }

 private:
  std::uint64_t key_;
  double p_;
};

// Accepts stream[i] iff active[i], heads[i] and it keeps the selection independent.
template <matroid::Matroid M>
std::vector<std::size_t> greedy_ocrs(const M& m, std::span<const typename M::Element> stream,
                                     std::span<const bool> active, std::span<const bool> heads) {
  if (active.size() != stream.size() || heads.size() != stream.size()) {
    throw PreconditionError("greedy_ocrs: activity and coin flags must match the stream");
  }
  std::vector<std::size_t> out;
  auto tracker = m.tracker();
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!active[i] || !heads[i]) continue;
    if (tracker.can_add(stream[i])) {
      tracker.add(stream[i]);
      out.push_back(i);
    }
  }
  return out;
}

enum class AdversaryOrder { kLabelAscending, kLabelDescending, kCoinAware };

std::string to_string(AdversaryOrder order);
// Permutation of `elements`. The coin-aware order puts heads first, then label descending.
std::vector<std::size_t> adversary_order(AdversaryOrder order,
                                         std::span<const matroid::LabeledVector> elements,
                                         std::span<const bool> heads);

// ---------------------------------------------------------------------------
// Bucketing prophet

class BucketLayout {
 public:
  BucketLayout(double opt, std::size_t rank);

  double opt() const { return opt_; }
  std::size_t rank() const { return rank_; }
  std::size_t k() const { return k_; }
  // Bucket indices: 0 is B_0, 1..k regular, k + 1 is B_inf.
  std::size_t num_buckets() const { return k_ + 2; }
  std::size_t infinity_bucket() const { return k_ + 1; }
  double lower(std::size_t bucket) const;
  double upper(std::size_t bucket) const;
  std::size_t bucket_of(double weight) const;

 private:
  double opt_;
  std::size_t rank_;
  std::size_t k_;
  double unit_;
};

// ceil(log2(8 rank)).
std::size_t bucket_count(std::size_t rank);

template <class Element>
struct WeightedStream {
  std::vector<Element> elements;  // arrival order
  std::vector<double> weights;
};

template <matroid::Matroid M>
double offline_prophet(const M& m, const WeightedStream<typename M::Element>& s) {
  return matroid::weighted_rank(m, std::span<const typename M::Element>(s.elements),
                                std::span<const double>(s.weights))
      .value;
}

template <matroid::Matroid M>
struct BucketingCalibration {
  double opt = 0.0;
  double opt_std_error = 0.0;
  std::vector<double> bucket_opt;       // OPT(B_i) per bucket index
  std::vector<double> bucket_std_error;
  std::size_t best_bucket = 0;
  std::size_t aux_samples = 0;
};

// Calibrates on auxiliary samples, then accepts greedily within B*.
template <matroid::Matroid M>
class BucketingProphet {
 public:
  using Element = typename M::Element;
  using Stream = WeightedStream<Element>;

  explicit BucketingProphet(const M& m) : m_(&m) {}

  const BucketingCalibration<M>& calibrate(std::span<const Stream> aux);
  // Calibrates against a caller-supplied OPT estimate.
  const BucketingCalibration<M>& calibrate(std::span<const Stream> aux, double opt_estimate);

  const BucketLayout& layout() const { return *layout_; }
  const BucketingCalibration<M>& calibration() const { return calibration_; }
  std::size_t best_bucket() const { return calibration_.best_bucket; }

  std::vector<std::size_t> run(const Stream& s) const {
    if (!layout_) throw PreconditionError("bucketing prophet: calibrate first");
    std::vector<std::size_t> out;
    auto tracker = m_->tracker();
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
      if (layout_->bucket_of(s.weights[i]) != calibration_.best_bucket) continue;
      if (tracker.can_add(s.elements[i])) {
        tracker.add(s.elements[i]);
        out.push_back(i);
      }
    }
    return out;
  }

 private:
  const M* m_;
  std::optional<BucketLayout> layout_;
  BucketingCalibration<M> calibration_;
};

template <matroid::Matroid M>
double estimate_opt(const M& m, std::span<const WeightedStream<typename M::Element>> aux) {
  if (aux.empty()) throw PreconditionError("estimate_opt: no samples");
  double total = 0.0;
  for (const auto& s : aux) total += offline_prophet(m, s);
  return total / static_cast<double>(aux.size());
}

template <matroid::Matroid M>
const BucketingCalibration<M>& BucketingProphet<M>::calibrate(std::span<const Stream> aux) {
  return calibrate(aux, estimate_opt(*m_, aux));
}

template <matroid::Matroid M>
const BucketingCalibration<M>& BucketingProphet<M>::calibrate(std::span<const Stream> aux,
                                                              double opt_estimate) {
  if (aux.empty()) throw PreconditionError("bucketing prophet: no auxiliary samples");
  layout_.emplace(opt_estimate, m_->full_rank());
  const std::size_t buckets = layout_->num_buckets();
  const double n = static_cast<double>(aux.size());
  std::vector<double> sum(buckets, 0.0), sumsq(buckets, 0.0);
  double opt_sum = 0.0, opt_sumsq = 0.0;
  for (const auto& s : aux) {
    const double full = offline_prophet(*m_, s);
    opt_sum += full;
    opt_sumsq += full * full;
    std::vector<Stream> split(buckets);
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
      auto& part = split[layout_->bucket_of(s.weights[i])];
      part.elements.push_back(s.elements[i]);
      part.weights.push_back(s.weights[i]);
    }
    for (std::size_t b = 0; b < buckets; ++b) {
      if (split[b].elements.empty()) continue;
      const double v = offline_prophet(*m_, split[b]);
      sum[b] += v;
      sumsq[b] += v * v;
    }
  }
  auto se = [n](double s, double s2) {
    if (n < 2) return 0.0;
    const double mean = s / n;
    return std::sqrt(std::max(0.0, (s2 - n * mean * mean) / (n - 1)) / n);
  };
  calibration_ = {};
  calibration_.aux_samples = aux.size();
  calibration_.opt = opt_estimate;
  calibration_.opt_std_error = se(opt_sum, opt_sumsq);
  calibration_.bucket_opt.resize(buckets);
  calibration_.bucket_std_error.resize(buckets);
  for (std::size_t b = 0; b < buckets; ++b) {
    calibration_.bucket_opt[b] = sum[b] / n;
    calibration_.bucket_std_error[b] = se(sum[b], sumsq[b]);
  }
  std::size_t best = 1;
  for (std::size_t b = 2; b < buckets; ++b) {
    if (calibration_.bucket_opt[b] > calibration_.bucket_opt[best]) best = b;
  }
  calibration_.best_bucket = best;
  return calibration_;
}

// ---------------------------------------------------------------------------
// Single-choice and partition prophets

// Index of the first weight with w >= threshold and w > 0.
std::optional<std::size_t> single_choice_prophet(std::span<const double> weights,
                                                 double threshold);

// Sampled value tau minimizing |Pr[max >= tau] - 1/2|; ties go to the larger tau.
double calibrate_threshold(std::vector<double> maxima);

// Partition prophet over element ids. Thresholds come from a fixed pool of auxiliary
// weight vectors indexed by element id, memoized per part.
class PartitionProphet {
 public:
  explicit PartitionProphet(std::vector<std::vector<double>> aux_weights);

  double threshold(const std::vector<std::uint32_t>& part);
  std::size_t cached_parts() const { return cache_.size(); }

  // Single-choice prophet per part of `partition`, elements arriving in `order`.
  std::vector<std::uint32_t> select(const matroid::SimplePartitionMatroid& partition,
                                    std::span<const std::uint32_t> order,
                                    std::span<const double> weights);

  template <matroid::Matroid M>
  std::vector<std::uint32_t> run(const M& m, const matroid::SimplePartitionMatroid& partition,
                                 std::span<const std::uint32_t> order,
                                 std::span<const double> weights) {
    auto picked = select(partition, order, weights);
    if (!matroid::is_independent(m, std::span<const std::uint32_t>(picked))) {
      std::string ids;
      for (auto e : picked) ids += " " + std::to_string(e);
      throw PreconditionError("partition prophet: selection {" + ids +
                              " } is dependent in M; the partition sampler broke I' within I");
    }
    return picked;
  }

 private:
  std::vector<std::vector<double>> aux_;
  std::map<std::vector<std::uint32_t>, double> cache_;
};

// ---------------------------------------------------------------------------
// Online policies

struct Arrival {
  std::size_t index = 0;
  double weight = 0.0;
  std::uint32_t level = 0;
};

class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;
  virtual std::string name() const = 0;
  virtual void begin_trial(std::uint64_t trial_key) { (void)trial_key; }
  // `feasible`: accepting keeps the selection independent.
  virtual bool accept(const Arrival& a, bool feasible) = 0;
};

class AcceptAllFeasible final : public OnlinePolicy {
 public:
  std::string name() const override { return "accept-all-feasible"; }
  bool accept(const Arrival& a, bool feasible) override { return feasible && a.weight > 0.0; }
};

class LevelThreshold final : public OnlinePolicy {
 public:
  explicit LevelThreshold(std::uint32_t t) : t_(t) {}
  std::string name() const override { return "level-threshold(" + std::to_string(t_) + ")"; }
  bool accept(const Arrival& a, bool feasible) override {
    return feasible && a.weight > 0.0 && a.level >= t_;
  }

 private:
  std::uint32_t t_;
};

// At most fraction * d / 2^l acceptances at level l.
class PerLevelCap final : public OnlinePolicy {
 public:
  PerLevelCap(double fraction, std::size_t d) : fraction_(fraction), d_(d) {}
  std::string name() const override;
  void begin_trial(std::uint64_t) override { taken_.clear(); }
  bool accept(const Arrival& a, bool feasible) override;

 private:
  double fraction_;
  std::size_t d_;
  std::map<std::uint32_t, std::size_t> taken_;
};

class RandomAccept final : public OnlinePolicy {
 public:
  explicit RandomAccept(double p) : p_(p), rng_(0) {}
  std::string name() const override;
  void begin_trial(std::uint64_t trial_key) override { rng_ = Rng(trial_key).derive("random-accept"); }
  bool accept(const Arrival& a, bool feasible) override {
    return feasible && a.weight > 0.0 && rng_.bernoulli(p_);
  }

 private:
  double p_;
  Rng rng_;
};

// Online phase of the bucketing prophet: greedy within a fixed bucket.
class BucketPolicy final : public OnlinePolicy {
 public:
  BucketPolicy(BucketLayout layout, std::size_t bucket) : layout_(layout), bucket_(bucket) {}
  std::string name() const override { return "bucketing"; }
  bool accept(const Arrival& a, bool feasible) override {
    return feasible && layout_.bucket_of(a.weight) == bucket_;
  }

 private:
  BucketLayout layout_;
  std::size_t bucket_;
};

std::vector<std::unique_ptr<OnlinePolicy>> gambler_policy_suite(
    std::size_t d, std::size_t kappa, std::optional<std::pair<BucketLayout, std::size_t>> bucketing = {});

struct PolicyOutcome {
  double reward = 0.0;
  std::vector<std::size_t> accepted;
};

// Presents the stream in order; throws if the policy accepts an infeasible element.
template <matroid::Matroid M>
PolicyOutcome run_policy(OnlinePolicy& policy, const M& m,
                         std::span<const typename M::Element> elements,
                         std::span<const double> weights, std::span<const std::uint32_t> levels,
                         std::uint64_t trial_key) {
  PolicyOutcome out;
  policy.begin_trial(trial_key);
  auto tracker = m.tracker();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const bool feasible = tracker.can_add(elements[i]);
    const Arrival a{i, weights[i], levels.empty() ? 0U : levels[i]};
    if (!policy.accept(a, feasible)) continue;
    if (!feasible) {
      throw PreconditionError("policy " + policy.name() + " accepted a dependent element at " +
                              std::to_string(i));
    }
    tracker.add(elements[i]);
    out.reward += weights[i];
    out.accepted.push_back(i);
  }
  return out;
}

}  // namespace pwsel::schemes

#endif  // PWSEL_SCHEMES_HPP_
