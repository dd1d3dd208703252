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


#ifndef PWSEL_STATS_HPP_
#define PWSEL_STATS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pwsel::stats {

struct Accumulator {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    sumsq += x * x;
  }
  void merge(const Accumulator& other) {
    count += other.count;
    sum += other.sum;
    sumsq += other.sumsq;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  // Unbiased sample variance.
  double variance() const;
};

// Paired samples, for ratio-of-means estimates.
struct PairAccumulator {
  std::uint64_t count = 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;

  void add(double x, double y) {
    ++count;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  void merge(const PairAccumulator& o) {
    count += o.count;
    sx += o.sx;
    sy += o.sy;
    sxx += o.sxx;
    syy += o.syy;
    sxy += o.sxy;
  }
};

struct Estimate {
  double mean = 0.0;
  std::uint64_t trials = 0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double z = 3.0;

  static Estimate from(const Accumulator& acc, double z = 3.0);
  static Estimate exact(double value);
  // mean +- z * std_error.
  static Estimate normal(double mean, double std_error, std::uint64_t trials, double z = 3.0);
  // Wilson score interval for a binomial proportion.
  static Estimate proportion(std::uint64_t successes, std::uint64_t trials, double z = 3.0);
  // E[x] / E[y] with a delta-method standard error.
  static Estimate ratio(const PairAccumulator& acc, double z = 3.0);

  Estimate scaled(double factor) const;
};

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

// Goodness of fit of counts against probabilities summing to one.
ChiSquare chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probs);
// Independence in a rows x cols table stored row-major; empty rows and columns are dropped.
ChiSquare chi_square_independence(std::span<const std::uint64_t> table, std::size_t rows,
                                  std::size_t cols);
double chi_square_survival(double statistic, std::size_t dof);
// Two-sided normal quantile multiplier for a confidence level, e.g. 0.9973 -> 3.
double z_for_confidence(double confidence);

}  // namespace pwsel::stats

#endif  // PWSEL_STATS_HPP_
