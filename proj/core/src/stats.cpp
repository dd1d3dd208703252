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

#include "pwsel/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "pwsel/gf.hpp"

namespace pwsel::stats {

double Accumulator::variance() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double m = sum / n;
  return std::max(0.0, (sumsq - n * m * m) / (n - 1.0));
}

Estimate Estimate::normal(double mean, double std_error, std::uint64_t trials, double z) {
  return {mean, trials, std_error, mean - z * std_error, mean + z * std_error, z};
}

Estimate Estimate::from(const Accumulator& acc, double z) {
  const double se =
      acc.count ? std::sqrt(acc.variance() / static_cast<double>(acc.count)) : 0.0;
  return normal(acc.mean(), se, acc.count, z);
}

Estimate Estimate::exact(double value) { return {value, 0, 0.0, value, value, 0.0}; }

Estimate Estimate::proportion(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 0, 0.0, 0.0, 1.0, z};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {p, trials, std::sqrt(p * (1 - p) / n), std::clamp(centre - half, 0.0, p),
          std::clamp(centre + half, p, 1.0), z};
}

Estimate Estimate::ratio(const PairAccumulator& a, double z) {
  if (a.count == 0 || a.sy == 0.0) return {0.0, a.count, 0.0, 0.0, 0.0, z};
  const double n = static_cast<double>(a.count);
  const double mx = a.sx / n, my = a.sy / n;
  const double r = mx / my;
  double se = 0.0;
  if (a.count > 1) {
    const double vxx = (a.sxx - n * mx * mx) / (n - 1);
    const double vyy = (a.syy - n * my * my) / (n - 1);
    const double vxy = (a.sxy - n * mx * my) / (n - 1);
    const double var = (vxx - 2 * r * vxy + r * r * vyy) / (my * my * n);
    se = std::sqrt(std::max(0.0, var));
  }
  return normal(r, se, a.count, z);
}

Estimate Estimate::scaled(double factor) const {
  Estimate e = *this;
  e.mean *= factor;
  e.std_error *= std::abs(factor);
  e.ci_low *= factor;
  e.ci_high *= factor;
  if (factor < 0) std::swap(e.ci_low, e.ci_high);
  return e;
}

double chi_square_survival(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  return boost::math::cdf(boost::math::complement(
      boost::math::chi_squared(static_cast<double>(dof)), std::max(0.0, statistic)));
}

ChiSquare chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probs) {
  if (observed.size() != probs.size() || observed.size() < 2) {
    throw PreconditionError("chi_square_gof: need matching counts and probabilities (>= 2 cells)");
  }
  double n = 0.0;
  for (auto x : observed) n += static_cast<double>(x);
  ChiSquare out;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * probs[i];
    if (e <= 0.0) throw PreconditionError("chi_square_gof: zero expected count");
    const double diff = static_cast<double>(observed[i]) - e;
    out.statistic += diff * diff / e;
  }
  out.dof = observed.size() - 1;
  out.p_value = chi_square_survival(out.statistic, out.dof);
  return out;
}

ChiSquare chi_square_independence(std::span<const std::uint64_t> table, std::size_t rows,
                                  std::size_t cols) {
  if (table.size() != rows * cols) throw PreconditionError("chi_square_independence: bad shape");
  std::vector<double> rs(rows, 0.0), cs(cols, 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      const auto x = static_cast<double>(table[a * cols + b]);
      rs[a] += x;
      cs[b] += x;
      total += x;
    }
  }
  const auto r = static_cast<std::size_t>(std::count_if(rs.begin(), rs.end(), [](double x) { return x > 0; }));
  const auto c = static_cast<std::size_t>(std::count_if(cs.begin(), cs.end(), [](double x) { return x > 0; }));
  ChiSquare out;
  if (r < 2 || c < 2) return out;
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      if (rs[a] == 0 || cs[b] == 0) continue;
      const double e = rs[a] * cs[b] / total;
      const double diff = static_cast<double>(table[a * cols + b]) - e;
      out.statistic += diff * diff / e;
    }
  }
  out.dof = (r - 1) * (c - 1);
  out.p_value = chi_square_survival(out.statistic, out.dof);
  return out;
}

double z_for_confidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw PreconditionError("confidence must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
}

}  // namespace pwsel::stats
