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

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "json.hpp"
#include "pwsel/parallel.hpp"
#include "pwsel/stats.hpp"

namespace pwsel::instances {
namespace {

using boost::multiprecision::cpp_int;

cpp_int big_pow(std::uint64_t q, std::size_t e) {
  cpp_int r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= q;
  return r;
}

gf::Vector random_nonzero(std::size_t dim, gf::Residue q, Rng& rng) {
  for (;;) {
    auto v = gf::Vector::random(dim, q, rng);
    if (!v.is_zero()) return v;
  }
}

std::string bits(const gf::Vector& v) {
  std::string out(v.dim(), '0');
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = static_cast<char>('0' + v.get(i));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// CRS instance

CrsInstance::CrsInstance(std::uint64_t q, std::size_t d, std::size_t c)
    : matroid_((gf::require_modulus(q), q), d, d), c_(c), class_size_(gf::checked_pow(q, d)) {
  if (d <= 2) throw PreconditionError("crs instance: need d > 2, got " + std::to_string(d));
  sigma_ = pifam::sigma_crs(q, c, d);
  sigma_columns_ = sigma_.columns();
  labels_.resize(d);
  for (std::size_t i = 0; i < d; ++i) labels_[i] = static_cast<std::uint32_t>(i + 1);
}

std::vector<matroid::LabeledVector> CrsInstance::sample_d1(Rng& rng) const {
  const std::size_t dd = d();
  std::vector<gf::Vector> r_cols;
  r_cols.reserve(c_);
  for (std::size_t k = 0; k < c_; ++k) r_cols.push_back(gf::Vector::random(dd, q(), rng));
  std::vector<matroid::LabeledVector> out;
  out.reserve(dd);
  for (std::size_t i = 0; i < dd; ++i) {
    gf::Vector x(dd, q());
    for (std::size_t k = 0; k < c_; ++k) x.add_scaled(r_cols[k], sigma_.at(k, i));
    out.push_back({std::move(x), labels_[i]});
  }
  return out;
}

pifam::ActiveSet CrsInstance::sample(Rng& rng, pifam::MixtureWeight weight) const {
  auto d1 = sample_d1(rng);
  std::vector<gf::Vector> cols;
  cols.reserve(d1.size());
  for (auto& e : d1) cols.push_back(std::move(e.vector));
  return pifam::matrix_to_set(std::span<const gf::Vector>(cols), labels_, rng, weight);
}

Rational CrsInstance::expected_size() const {
  const Rational Q(big_pow(q(), d()));
  const Rational dd(d());
  const Rational from_d1 = (1 - 1 / Q) * dd;
  const Rational from_d2 = (1 / Q) * (dd * (1 / Q) * Q);
  return from_d1 + from_d2;
}

pifam::ActiveSet sample_crs_instance(std::uint64_t q, std::size_t d, std::size_t c, Rng& rng) {
  return CrsInstance(q, d, c).sample(rng);
}

PolytopeReport check_polytope(const CrsInstance& instance, std::size_t subset_trials, Rng& rng) {
  PolytopeReport report;
  const std::size_t d = instance.d();
  const gf::Residue q = instance.q();
  const cpp_int Q = big_pow(q, d);
  const auto& m = instance.matroid();
  auto check = [&](const cpp_int& size, std::size_t rank, const std::string& what) {
    ++report.sets_checked;
    if (size > cpp_int(rank) * Q) {
      report.violations.push_back(what + ": mu = " + size.str() + "/q^d exceeds rank " +
                                  std::to_string(rank));
    }
  };

  for (std::size_t t = 0; t < subset_trials; ++t) {
    const auto s = 1 + rng.uniform_below(3 * d);
    std::set<matroid::LabeledVector> subset;
    for (std::size_t k = 0; k < s; ++k) {
      subset.insert({random_nonzero(d, q, rng),
                     static_cast<std::uint32_t>(1 + rng.uniform_below(d))});
    }
    std::vector<matroid::LabeledVector> elems(subset.begin(), subset.end());
    check(cpp_int(elems.size()), m.rank(elems), "random subset of " + std::to_string(s));
  }

  for (std::size_t t = 0; t < subset_trials; ++t) {
    const auto r = 1 + rng.uniform_below(d);
    gf::LinearBasis basis(d, q);
    for (std::size_t k = 0; k < r; ++k) basis.insert(random_nonzero(d, q, rng));
    const auto rank = basis.rank();
    check(cpp_int(d) * big_pow(q, rank), rank, "flat of rank " + std::to_string(rank) + " x [d]");
  }

  check(cpp_int(d) * Q, d, "ground set");
  check(cpp_int(d), 1, "one nonzero vector x [d]");
  report.known_exceptions.push_back(
      "zero vector x [d]: mu = d/q^d = " + std::to_string(d) + "/" + Q.str() +
      " > rank 0 (loops carry positive marginal)");
  return report;
}

// ---------------------------------------------------------------------------
// Prophet instance

std::size_t prophet_label_count(std::size_t d, std::size_t kappa) {
  std::size_t n = 0;
  for (std::size_t l = 1; l <= kappa; ++l) n += d >> l;
  return n;
}

std::pair<std::uint32_t, std::uint32_t> level_labels(std::size_t d, std::size_t level) {
  const std::size_t first = prophet_label_count(d, level - 1) + 1;
  return {static_cast<std::uint32_t>(first),
          static_cast<std::uint32_t>(first + (d >> level) - 1)};
}

std::size_t level_of_label(std::size_t d, std::size_t kappa, std::uint32_t label) {
  std::size_t upto = 0;
  for (std::size_t l = 1; l <= kappa; ++l) {
    upto += d >> l;
    if (label >= 1 && label <= upto) return l;
  }
  throw PreconditionError("label " + std::to_string(label) + " outside [1, n]");
}

matroid::DuplicatedLinearMatroid prophet_matroid(std::size_t d, std::size_t kappa) {
  return matroid::DuplicatedLinearMatroid(2, 2 * d, prophet_label_count(d, kappa));
}

gf::FieldMatrix ProphetSample::r_matrix() const {
  return gf::FieldMatrix::from_columns(r_columns, 2 * d);
}

double ProphetSample::weight_of(const matroid::LabeledVector& e) const {
  const auto level = level_of_label(d, kappa, e.label);
  const double w = std::ldexp(1.0, static_cast<int>(level));
  if (branches[level - 1] == pifam::Branch::kD2) {
    const auto& blocks = full_blocks[level - 1];
    return std::binary_search(blocks.begin(), blocks.end(), e.label) ? w : 0.0;
  }
  const auto first = level_labels(d, level).first;
  return level_columns[level - 1][e.label - first] == e.vector ? w : 0.0;
}

ProphetSample sample_prophet_instance(std::size_t d, std::size_t kappa, Rng& rng,
                                      const ProphetOptions& options) {
  ProphetSample s;
  for (;;) {
    s.d = d;
    s.kappa = kappa;
    s.n = prophet_label_count(d, kappa);
    s.off_grid = d != (std::size_t{1} << std::min<std::size_t>(2 * kappa, 63));
    s.nested = pifam::sigma_prophet(d, kappa, rng);
    const std::size_t dim = 2 * d;
    s.r_columns.clear();
    for (std::size_t k = 0; k < d; ++k) s.r_columns.push_back(gf::Vector::random(dim, 2, rng));
    bool full_rank = true;
    if (options.compute_e_hard || options.condition_on_e_hard) {
      gf::LinearBasis basis(dim, 2);
      for (const auto& col : s.r_columns) {
        if (!basis.insert(col)) {
          full_rank = false;
          break;
        }
      }
    }
    s.level_columns.assign(kappa, {});
    s.branches.assign(kappa, pifam::Branch::kD1);
    s.full_blocks.assign(kappa, {});
    s.candidates.clear();
    bool all_d1 = true;
    for (std::size_t l = 1; l <= kappa; ++l) {
      auto& cols = s.level_columns[l - 1];
      const std::size_t count = s.nested.num_columns(l);
      cols.reserve(count);
      for (std::size_t c = 0; c < count; ++c) {
        gf::Vector x(dim, 2);
        for (auto coord : s.nested.column_support(l, c)) x += s.r_columns[coord];
        cols.push_back(std::move(x));
      }
      const auto [first, last] = level_labels(d, l);
      std::vector<std::uint32_t> labels(count);
      for (std::size_t i = 0; i < count; ++i) labels[i] = static_cast<std::uint32_t>(first + i);
      auto active = pifam::matrix_to_set(std::span<const gf::Vector>(cols), labels, rng,
                                         options.weight);
      const double w = std::ldexp(1.0, static_cast<int>(l));
      s.branches[l - 1] = active.branch;
      if (active.branch == pifam::Branch::kD2) {
        all_d1 = false;
        s.full_blocks[l - 1] = active.full_blocks;
        // A block stands in for all of GF(2)^{2d}; its unit vectors span it.
        std::vector<Candidate> block;
        for (auto label : active.full_blocks) {
          for (std::size_t k = 0; k < dim; ++k) {
            block.push_back({{gf::Vector::unit(dim, k, 2), label}, static_cast<std::uint32_t>(l), w});
          }
        }
        std::sort(block.begin(), block.end(),
                  [](const Candidate& a, const Candidate& b) { return a.element < b.element; });
        s.candidates.insert(s.candidates.end(), block.begin(), block.end());
      } else {
        for (auto& e : active.explicit_elements) {
          s.candidates.push_back({std::move(e), static_cast<std::uint32_t>(l), w});
        }
      }
    }
    s.e_hard = full_rank && all_d1;
    if (!options.condition_on_e_hard || s.e_hard) return s;
    if (++s.rejections > options.max_rejections) {
      throw PreconditionError("condition_on_e_hard: rejection limit reached");
    }
  }
}

std::string to_json(const ProphetSample& sample) {
  nlohmann::json j;
  j["schema"] = 1;
  j["d"] = sample.d;
  j["kappa"] = sample.kappa;
  j["n"] = sample.n;
  j["seed"] = sample.nested.seed;
  j["e_hard"] = sample.e_hard;
  j["off_grid"] = sample.off_grid;
  j["rejections"] = sample.rejections;
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& c : sample.candidates) {
    weights[std::to_string(c.element.label)].push_back(
        {{"vector", bits(c.element.vector)}, {"weight", c.weight}});
  }
  j["weights"] = std::move(weights);
  j["full_blocks"] = sample.full_blocks;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Pairwise weight test

WeightTestReport pairwise_weight_test(std::size_t d, std::size_t kappa, std::uint64_t trials,
                                      Rng& rng, const WeightTestOptions& options) {
  if (kappa < 1 || kappa > 31 || d == 0 || !std::has_single_bit(d) ||
      d < (std::size_t{1} << (2 * kappa - 1))) {
    throw PreconditionError("pairwise_weight_test: need d a power of two with d >= 2^(2 kappa - 1)");
  }
  if (options.prefix_bits == 0 || options.prefix_bits > 8 || options.prefix_bits > 2 * d) {
    throw PreconditionError("pairwise_weight_test: prefix_bits must be in [1, min(8, 2d)]");
  }
  const std::size_t n = prophet_label_count(d, kappa);
  WeightTestReport report;
  report.trials = trials;
  report.alpha = options.alpha;

  Rng pick = rng.derive("pairs");
  std::vector<std::size_t> wide;
  for (std::size_t l = 1; l <= kappa; ++l) {
    if ((d >> l) >= 2) wide.push_back(l);
  }
  auto label_in = [&](std::size_t level) {
    const auto [first, last] = level_labels(d, level);
    return static_cast<std::uint32_t>(first + pick.uniform_below(last - first + 1));
  };
  for (std::size_t p = 0; p < options.pairs_per_case && !wide.empty(); ++p) {
    const auto level = wide[pick.uniform_below(wide.size())];
    const auto a = label_in(level);
    auto b = a;
    while (b == a) b = label_in(level);
    report.pairs.push_back({a, b, level, level});
  }
  for (std::size_t p = 0; p < options.pairs_per_case && kappa >= 2; ++p) {
    const auto la = 1 + pick.uniform_below(kappa);
    auto lb = la;
    while (lb == la) lb = 1 + pick.uniform_below(kappa);
    report.pairs.push_back({label_in(la), label_in(lb), la, lb});
  }

  const std::size_t k = (std::size_t{1} << options.prefix_bits) + 1;
  struct State {
    std::vector<std::uint64_t> tables;
    std::uint64_t case1 = 0;
  };
  State init{std::vector<std::uint64_t>(report.pairs.size() * k * k, 0), 0};
  ProphetOptions sample_options;
  sample_options.compute_e_hard = false;
  const Rng base = rng.derive("trials");
  auto result = run_trials(
      trials, options.threads, init,
      [&](State& st, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto s = sample_prophet_instance(d, kappa, tr, sample_options);
        std::vector<std::uint32_t> category(n + 1, static_cast<std::uint32_t>(k - 1));
        for (const auto& c : s.candidates) {
          const auto level = level_of_label(d, kappa, c.element.label);
          if (level != c.level || c.weight != std::ldexp(1.0, static_cast<int>(level))) ++st.case1;
          if (s.branches[level - 1] != pifam::Branch::kD1) continue;
          std::uint32_t prefix = 0;
          for (std::size_t b = 0; b < options.prefix_bits; ++b) {
            prefix |= c.element.vector.get(b) << b;
          }
          category[c.element.label] = prefix;
        }
        for (std::size_t p = 0; p < report.pairs.size(); ++p) {
          const auto& pr = report.pairs[p];
          ++st.tables[(p * k + category[pr.label_a]) * k + category[pr.label_b]];
        }
      },
      [](State& into, const State& from) {
        for (std::size_t i = 0; i < into.tables.size(); ++i) into.tables[i] += from.tables[i];
        into.case1 += from.case1;
      });

  report.case1_violations = result.case1;
  report.corrected_alpha =
      report.pairs.empty() ? options.alpha : options.alpha / static_cast<double>(report.pairs.size());
  for (std::size_t p = 0; p < report.pairs.size(); ++p) {
    const auto chi = stats::chi_square_independence(
        std::span<const std::uint64_t>(result.tables).subspan(p * k * k, k * k), k, k);
    auto& pr = report.pairs[p];
    pr.statistic = chi.statistic;
    pr.dof = chi.dof;
    pr.p_value = chi.p_value;
    pr.rejected = pr.p_value < report.corrected_alpha;
    report.rejected += pr.rejected;
  }
  return report;
}

pifam::ExactMixtureReport exact_weight_check(std::size_t d, std::size_t kappa,
                                             pifam::MixtureWeight weight) {
  if (kappa != 1) throw PreconditionError("exact_weight_check: only kappa = 1 has a fixed Sigma");
  if (2 * d * d > 24) throw PreconditionError("exact_weight_check: tape exceeds 2^24");
  Rng unused(0);
  const auto ns = pifam::sigma_prophet(d, kappa, unused);
  const std::size_t dim = 2 * d;
  const std::size_t n = prophet_label_count(d, kappa);
  const std::uint64_t tapes = std::uint64_t{1} << (dim * d);
  std::vector<std::vector<gf::Vector>> all;
  all.reserve(tapes);
  for (std::uint64_t t = 0; t < tapes; ++t) {
    std::vector<gf::Vector> r(d, gf::Vector(dim, 2));
    for (std::size_t bit = 0; bit < dim * d; ++bit) {
      r[bit / dim].set(bit % dim, static_cast<gf::Residue>((t >> bit) & 1U));
    }
    std::vector<gf::Vector> x;
    for (std::size_t c = 0; c < n; ++c) {
      gf::Vector col(dim, 2);
      for (auto coord : ns.column_support(1, c)) col += r[coord];
      x.push_back(std::move(col));
    }
    all.push_back(std::move(x));
  }
  std::vector<std::uint32_t> labels(n), groups(n, 0);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i + 1);
  return pifam::exact_mixture_deviation(all, labels, groups, weight);
}

}  // namespace pwsel::instances
