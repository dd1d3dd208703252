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

#include "pwsel/schemes.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace pwsel::schemes {

double ocrs_coin_probability(std::size_t rank) {
  if (rank == 0) throw PreconditionError("ocrs: rank must be positive");
  return 1.0 / (2.0 * static_cast<double>(rank));
}

bool PrecommittedCoins::heads(std::uint64_t element_id) const {
  const std::uint64_t h = mix64(key_ ^ mix64(element_id + 0x632be59bd9b4e019ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < p_;
}

std::string to_string(AdversaryOrder order) {
  switch (order) {
    case AdversaryOrder::kLabelAscending:
      return "label-ascending";
    case AdversaryOrder::kLabelDescending:
      return "label-descending";
    case AdversaryOrder::kCoinAware:
      return "coin-aware";
  }
  return "unknown";
}

std::vector<std::size_t> adversary_order(AdversaryOrder order,
                                         std::span<const matroid::LabeledVector> elements,
                                         std::span<const bool> heads) {
  if (heads.size() != elements.size()) {
    throw PreconditionError("adversary_order: one coin per element");
  }
  std::vector<std::size_t> idx(elements.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  switch (order) {
    case AdversaryOrder::kLabelAscending:
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return elements[a] < elements[b]; });
      break;
    case AdversaryOrder::kLabelDescending:
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return elements[b] < elements[a]; });
      break;
    case AdversaryOrder::kCoinAware:
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (heads[a] != heads[b]) return static_cast<bool>(heads[a]);
        return elements[b] < elements[a];
      });
      break;
  }
  return idx;
}

// ---------------------------------------------------------------------------
// Buckets

std::size_t bucket_count(std::size_t rank) {
  if (rank == 0) throw PreconditionError("bucket_count: rank must be positive");
  std::size_t k = 0;
  while ((std::uint64_t{1} << k) < 8 * static_cast<std::uint64_t>(rank)) ++k;
  return k;
}

BucketLayout::BucketLayout(double opt, std::size_t rank)
    : opt_(opt), rank_(rank), k_(0), unit_(0.0) {
  if (!(opt > 0.0)) throw PreconditionError("bucket layout: opt estimate must be positive");
  k_ = bucket_count(rank);
  unit_ = opt / (2.0 * static_cast<double>(rank));
}

double BucketLayout::lower(std::size_t bucket) const {
  if (bucket == 0) return 0.0;
  return std::ldexp(unit_, static_cast<int>(bucket) - 1);
}

double BucketLayout::upper(std::size_t bucket) const {
  if (bucket >= infinity_bucket()) return std::numeric_limits<double>::infinity();
  return std::ldexp(unit_, static_cast<int>(bucket));
}

std::size_t BucketLayout::bucket_of(double weight) const {
  if (weight < unit_) return 0;
  for (std::size_t b = 1; b <= k_; ++b) {
    if (weight < upper(b)) return b;
  }
  return infinity_bucket();
}

// ---------------------------------------------------------------------------
// Single choice

std::optional<std::size_t> single_choice_prophet(std::span<const double> weights,
                                                 double threshold) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0 && weights[i] >= threshold) return i;
  }
  return std::nullopt;
}

double calibrate_threshold(std::vector<double> maxima) {
  if (maxima.empty()) return 0.0;
  std::sort(maxima.begin(), maxima.end());
  if (maxima.back() <= 0.0) return 0.0;
  const double n = static_cast<double>(maxima.size());
  double best = 0.0, best_gap = 2.0;
  for (auto it = maxima.begin(); it != maxima.end(); it = std::upper_bound(it, maxima.end(), *it)) {
    const double tail = static_cast<double>(maxima.end() - it) / n;
    const double gap = std::abs(tail - 0.5);
    if (gap <= best_gap) {
      best_gap = gap;
      best = *it;
    }
  }
  return best;
}

PartitionProphet::PartitionProphet(std::vector<std::vector<double>> aux_weights)
    : aux_(std::move(aux_weights)) {}

double PartitionProphet::threshold(const std::vector<std::uint32_t>& part) {
  std::vector<std::uint32_t> key = part;
  std::sort(key.begin(), key.end());
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  std::vector<double> maxima;
  if (!key.empty()) {
    maxima.reserve(aux_.size());
    for (const auto& w : aux_) {
      double m = 0.0;
      for (auto e : key) {
        if (e >= w.size()) throw PreconditionError("partition prophet: aux weights too short");
        m = std::max(m, w[e]);
      }
      maxima.push_back(m);
    }
  }
  const double tau = calibrate_threshold(std::move(maxima));
  cache_.emplace(std::move(key), tau);
  return tau;
}

std::vector<std::uint32_t> PartitionProphet::select(
    const matroid::SimplePartitionMatroid& partition, std::span<const std::uint32_t> order,
    std::span<const double> weights) {
  std::vector<double> tau(partition.num_parts());
  for (std::size_t p = 0; p < tau.size(); ++p) tau[p] = threshold(partition.parts()[p]);
  std::vector<bool> used(partition.num_parts(), false);
  std::vector<std::uint32_t> picked;
  for (auto e : order) {
    if (!partition.contains(e)) continue;
    if (e >= weights.size()) throw PreconditionError("partition prophet: weight vector too short");
    const auto p = partition.part_of(e);
    if (used[p]) continue;
    if (weights[e] > 0.0 && weights[e] >= tau[p]) {
      used[p] = true;
      picked.push_back(e);
    }
  }
  return picked;
}

// ---------------------------------------------------------------------------
// Policies

std::string PerLevelCap::name() const {
  std::ostringstream out;
  out << "per-level-cap(" << fraction_ << ")";
  return out.str();
}

bool PerLevelCap::accept(const Arrival& a, bool feasible) {
  if (!feasible || a.weight <= 0.0) return false;
  const double cap = fraction_ * static_cast<double>(d_ >> std::min<std::uint32_t>(a.level, 63));
  auto& taken = taken_[a.level];
  if (static_cast<double>(taken) + 1.0 > cap) return false;
  ++taken;
  return true;
}

std::string RandomAccept::name() const {
  std::ostringstream out;
  out << "random-accept(" << p_ << ")";
  return out.str();
}

std::vector<std::unique_ptr<OnlinePolicy>> gambler_policy_suite(
    std::size_t d, std::size_t kappa, std::optional<std::pair<BucketLayout, std::size_t>> bucketing) {
  std::vector<std::unique_ptr<OnlinePolicy>> out;
  out.push_back(std::make_unique<AcceptAllFeasible>());
  for (std::size_t t = 1; t <= kappa; ++t) {
    out.push_back(std::make_unique<LevelThreshold>(static_cast<std::uint32_t>(t)));
  }
  for (double f : {0.25, 0.5}) out.push_back(std::make_unique<PerLevelCap>(f, d));
  for (double p : {0.25, 0.5}) out.push_back(std::make_unique<RandomAccept>(p));
  if (bucketing) {
    out.push_back(std::make_unique<BucketPolicy>(bucketing->first, bucketing->second));
  }
  return out;
}

}  // namespace pwsel::schemes
