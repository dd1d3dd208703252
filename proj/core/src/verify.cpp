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

#include "pwsel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace pwsel::verify {
namespace {

Rational absr(const Rational& r) { return r < 0 ? Rational(-r) : r; }

gf::FieldMatrix exact_sigma(const ExactParams& p) {
  auto cols = pifam::projective_columns(p.q, p.m, p.n);
  if (p.duplicate_sigma_column) {
    if (p.n < 2) throw PreconditionError("duplicate column mutation needs n >= 2");
    cols.back() = cols.front();
  }
  return gf::FieldMatrix::from_columns(cols, p.m);
}

// Columns of X = R sigma for every R in GF(q)^{d x m}.
std::vector<std::vector<gf::Vector>> enumerate_tapes(const gf::FieldMatrix& sigma, std::size_t d) {
  const std::uint64_t q = sigma.modulus();
  const std::size_t m = sigma.rows();
  const std::uint64_t tapes = gf::checked_pow(q, d * m);
  if (tapes == 0 || tapes > kMaxExactTapes) {
    throw PreconditionError("exact check: q^(d m) tapes exceed 2^24");
  }
  std::vector<std::vector<gf::Vector>> out;
  out.reserve(tapes);
  const auto qr = static_cast<gf::Residue>(q);
  for (std::uint64_t t = 0; t < tapes; ++t) {
    std::vector<gf::Vector> r(m, gf::Vector(d, qr));
    std::uint64_t rest = t;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        r[k].set(i, static_cast<gf::Residue>(rest % q));
        rest /= q;
      }
    }
    std::vector<gf::Vector> x;
    x.reserve(sigma.cols());
    for (std::size_t c = 0; c < sigma.cols(); ++c) {
      gf::Vector col(d, qr);
      for (std::size_t k = 0; k < m; ++k) col.add_scaled(r[k], sigma.at(k, c));
      x.push_back(std::move(col));
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

ExactReport exact_pairwise_check(Construction construction, const ExactParams& params) {
  gf::require_modulus(params.q);
  if (params.d < params.m) throw PreconditionError("exact check: need d >= m");
  const auto sigma = exact_sigma(params);
  const auto tapes = enumerate_tapes(sigma, params.d);
  const std::size_t n = params.n;
  ExactReport report;
  report.tapes = tapes.size();

  if (construction == Construction::kUnordered) {
    std::vector<std::uint32_t> labels(n), groups(n, 0);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i + 1);
    const auto mix = pifam::exact_mixture_deviation(tapes, labels, groups, params.weight);
    report.max_deviation = mix.max_product_deviation;
    report.max_marginal_deviation = mix.max_marginal_deviation;
    report.max_target_deviation = mix.max_target_deviation;
    report.pairs = mix.pairs;
    return report;
  }

  const std::uint64_t Q = gf::checked_pow(params.q, params.d);
  if (Q == 0 || Q * n > 4096) throw PreconditionError("exact check: q^d n too large");
  const auto classes = static_cast<std::size_t>(Q);
  std::vector<std::uint64_t> single(n * classes, 0), joint(n * n * classes * classes, 0);
  std::vector<std::size_t> idx(n);
  for (const auto& tape : tapes) {
    for (std::size_t i = 0; i < n; ++i) {
      idx[i] = static_cast<std::size_t>(tape[i].index());
      ++single[i * classes + idx[i]];
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        ++joint[((i * n + j) * classes + idx[i]) * classes + idx[j]];
      }
    }
  }
  const Rational T(tapes.size());
  const Rational inv_q = Rational(1) / Q;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < classes; ++v) {
      report.max_marginal_deviation = std::max(
          report.max_marginal_deviation, absr(Rational(single[i * classes + v]) / T - inv_q));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t v = 0; v < classes; ++v) {
        for (std::size_t u = 0; u < classes; ++u) {
          const Rational both = Rational(joint[((i * n + j) * classes + v) * classes + u]) / T;
          const Rational product =
              Rational(single[i * classes + v]) * Rational(single[j * classes + u]) / (T * T);
          report.max_deviation = std::max(report.max_deviation, absr(both - product));
          report.max_target_deviation =
              std::max(report.max_target_deviation, absr(both - inv_q * inv_q));
          ++report.pairs;
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// CRS hardness

CrsGapReport crs_hardness_gap(std::uint64_t q, std::size_t d, std::size_t c, std::uint64_t trials,
                              Rng& rng, const RunOptions& options, std::uint64_t naive_trials) {
  const instances::CrsInstance instance(q, d, c);
  CrsGapReport report;
  report.q = q;
  report.d = d;
  report.c = c;
  report.bound = static_cast<double>(c + 1) / static_cast<double>(d);
  report.vacuous = report.bound >= 1.0;

  struct State {
    Accumulator rank;
    std::uint64_t violations = 0;
  };
  const Rng base = rng.derive("crs-d1");
  const auto st = run_trials(
      trials, options.threads, State{},
      [&](State& s, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto active = instance.sample_d1(tr);
        const auto r = instance.matroid().rank(active);
        s.rank.add(static_cast<double>(r));
        s.violations += r > c;
      },
      [](State& into, const State& from) {
        into.rank.merge(from.rank);
        into.violations += from.violations;
      });
  report.d1_rank_violations = st.violations;
  report.rank_d1 = Estimate::from(st.rank, options.z);

  // Under D2 each label joins with probability p = q^-d; the rank is d unless none joins.
  const double log_q = std::log(static_cast<double>(q));
  const double p = std::exp(-static_cast<double>(d) * log_q);
  const double none = std::exp(static_cast<double>(d) * std::log1p(-p));
  report.rank_d2 = static_cast<double>(d) * (1.0 - none);
  report.rank = Estimate::normal((1.0 - p) * report.rank_d1.mean + p * report.rank_d2,
                                 (1.0 - p) * report.rank_d1.std_error, st.rank.count, options.z);
  report.expected_size = instance.expected_size();
  report.ratio = report.rank.scaled(1.0 / static_cast<double>(d));

  if (naive_trials > 0) {
    const Rng nb = rng.derive("crs-naive");
    const auto naive = run_trials(
        naive_trials, options.threads, Accumulator{},
        [&](Accumulator& acc, std::uint64_t t) {
          Rng tr = nb.derive("trial", t);
          const auto a = instance.sample(tr);
          acc.add(static_cast<double>(pifam::active_rank(a, instance.matroid())));
        },
        [](Accumulator& into, const Accumulator& from) { into.merge(from); });
    report.naive_rank = Estimate::from(naive, options.z);
    const double se = std::hypot(report.naive_rank.std_error, report.rank.std_error);
    report.naive_agrees = std::abs(report.naive_rank.mean - report.rank.mean) <= options.z * se + 1e-12;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Disjunction

double disjunction_lower_bound(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) s += x;
  return s / (1.0 + s);
}

DisjunctionReport disjunction_bound_check(const std::vector<double>& p,
                                          const std::function<std::vector<bool>(Rng&)>& sampler,
                                          std::uint64_t trials, Rng& rng,
                                          const RunOptions& options) {
  const std::size_t k = p.size();
  struct State {
    std::vector<std::uint64_t> hits;
    std::uint64_t any = 0;
  };
  const Rng base = rng.derive("disjunction");
  const auto st = run_trials(
      trials, options.threads, State{std::vector<std::uint64_t>(k, 0), 0},
      [&](State& s, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto events = sampler(tr);
        if (events.size() != k) throw PreconditionError("disjunction: sampler returned wrong size");
        bool any = false;
        for (std::size_t i = 0; i < k; ++i) {
          s.hits[i] += events[i];
          any = any || events[i];
        }
        s.any += any;
      },
      [](State& into, const State& from) {
        for (std::size_t i = 0; i < into.hits.size(); ++i) into.hits[i] += from.hits[i];
        into.any += from.any;
      });
  DisjunctionReport report;
  const double n = static_cast<double>(trials);
  for (std::size_t i = 0; i < k; ++i) {
    report.marginals.push_back(Estimate::proportion(st.hits[i], trials, options.z));
    const double tol = std::max(options.z, 6.0) * std::sqrt(p[i] * (1 - p[i]) / n) + 1e-12;
    if (std::abs(report.marginals.back().mean - p[i]) > tol) {
      throw PreconditionError("disjunction: marginal " + std::to_string(i) + " is " +
                              std::to_string(report.marginals.back().mean) + ", expected " +
                              std::to_string(p[i]));
    }
  }
  report.pr_or = Estimate::proportion(st.any, trials, options.z);
  report.lemma_bound = disjunction_lower_bound(p);
  double none = 1.0;
  for (double x : p) none *= 1.0 - x;
  report.independent_or = 1.0 - none;
  report.product_bound = report.independent_or / 1.299;
  report.lemma_holds = report.pr_or.ci_high >= report.lemma_bound;
  report.product_holds = report.pr_or.ci_high >= report.product_bound;
  return report;
}

// ---------------------------------------------------------------------------
// Prophet hardness

namespace {

struct StreamView {
  std::vector<matroid::LabeledVector> elements;
  std::vector<double> weights;
  std::vector<std::uint32_t> levels;
};

StreamView view_of(const instances::ProphetSample& s) {
  StreamView v;
  v.elements.reserve(s.candidates.size());
  for (const auto& c : s.candidates) {
    v.elements.push_back(c.element);
    v.weights.push_back(c.weight);
    v.levels.push_back(c.level);
  }
  return v;
}

schemes::WeightedStream<matroid::LabeledVector> stream_of(const instances::ProphetSample& s) {
  auto v = view_of(s);
  return {std::move(v.elements), std::move(v.weights)};
}

}  // namespace

ProphetGapReport prophet_hardness_gap(std::size_t d, std::size_t kappa, std::uint64_t trials,
                                      Rng& rng, const ProphetGapOptions& options) {
  const auto m = instances::prophet_matroid(d, kappa);
  ProphetGapReport report;
  report.d = d;
  report.kappa = kappa;
  report.off_grid = d != (std::size_t{1} << std::min<std::size_t>(2 * kappa, 63));
  report.stated_prophet_bound = static_cast<double>(kappa * d) / 10.0;
  report.proof_prophet_bound = static_cast<double>(kappa * d) / 4.0;
  report.gambler_bound = 2.0 * static_cast<double>(d);
  report.ratio_bound = 10.0 / static_cast<double>(kappa);

  std::optional<std::pair<schemes::BucketLayout, std::size_t>> bucketing;
  if (options.bucketing_aux > 0) {
    Rng aux_rng = rng.derive("bucketing-aux");
    std::vector<schemes::WeightedStream<matroid::LabeledVector>> aux;
    for (std::size_t i = 0; i < options.bucketing_aux; ++i) {
      Rng tr = aux_rng.derive("sample", i);
      aux.push_back(stream_of(instances::sample_prophet_instance(d, kappa, tr)));
    }
    schemes::BucketingProphet<matroid::DuplicatedLinearMatroid> alg(m);
    alg.calibrate(aux);
    bucketing.emplace(alg.layout(), alg.best_bucket());
  }
  const auto prototype = schemes::gambler_policy_suite(d, kappa, bucketing);

  struct State {
    Accumulator prophet;
    std::vector<Accumulator> policies;
    std::uint64_t rejections = 0;
  };
  instances::ProphetOptions sample_options;
  sample_options.condition_on_e_hard = true;
  const Rng base = rng.derive("prophet-gap");
  const auto st = run_trials(
      trials, options.threads, State{{}, std::vector<Accumulator>(prototype.size()), 0},
      [&](State& s, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto sample = instances::sample_prophet_instance(d, kappa, tr, sample_options);
        s.rejections += sample.rejections;
        const auto v = view_of(sample);
        const std::span<const matroid::LabeledVector> elems(v.elements);
        s.prophet.add(matroid::weighted_rank(m, elems, std::span<const double>(v.weights)).value);
        auto suite = schemes::gambler_policy_suite(d, kappa, bucketing);
        const auto key = tr.derive("policies").key();
        for (std::size_t p = 0; p < suite.size(); ++p) {
          s.policies[p].add(
              schemes::run_policy(*suite[p], m, elems, v.weights, v.levels, key).reward);
        }
      },
      [](State& into, const State& from) {
        into.prophet.merge(from.prophet);
        for (std::size_t p = 0; p < into.policies.size(); ++p) into.policies[p].merge(from.policies[p]);
        into.rejections += from.rejections;
      });
  report.rejections = st.rejections;
  report.prophet = Estimate::from(st.prophet, options.z);
  for (std::size_t p = 0; p < prototype.size(); ++p) {
    report.policies.push_back({prototype[p]->name(), Estimate::from(st.policies[p], options.z)});
    if (report.policies[p].reward.mean > report.policies[report.best_policy].reward.mean) {
      report.best_policy = p;
    }
  }
  if (report.prophet.mean > 0 && !report.policies.empty()) {
    report.ratio = report.policies[report.best_policy].reward.mean / report.prophet.mean;
  }
  return report;
}

BucketingReport bucketing_gap(std::size_t d, std::size_t kappa, std::uint64_t trials,
                              std::size_t aux_samples, Rng& rng, const RunOptions& options) {
  const auto m = instances::prophet_matroid(d, kappa);
  Rng aux_rng = rng.derive("bucketing-aux");
  std::vector<schemes::WeightedStream<matroid::LabeledVector>> aux;
  aux.reserve(aux_samples);
  for (std::size_t i = 0; i < aux_samples; ++i) {
    Rng tr = aux_rng.derive("sample", i);
    aux.push_back(stream_of(instances::sample_prophet_instance(d, kappa, tr)));
  }
  schemes::BucketingProphet<matroid::DuplicatedLinearMatroid> alg(m);
  const auto& cal = alg.calibrate(aux);
  aux.clear();

  BucketingReport report;
  report.d = d;
  report.kappa = kappa;
  report.rank = m.full_rank();
  report.k = alg.layout().k();
  report.opt_estimate = cal.opt;
  report.opt_std_error = cal.opt_std_error;
  report.best_bucket = cal.best_bucket;
  report.bucket_opt = cal.bucket_opt;

  struct State {
    Accumulator reward, prophet;
  };
  const Rng base = rng.derive("bucketing-run");
  const auto st = run_trials(
      trials, options.threads, State{},
      [&](State& s, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto stream = stream_of(instances::sample_prophet_instance(d, kappa, tr));
        double reward = 0.0;
        for (auto i : alg.run(stream)) reward += stream.weights[i];
        s.reward.add(reward);
        s.prophet.add(schemes::offline_prophet(m, stream));
      },
      [](State& into, const State& from) {
        into.reward.merge(from.reward);
        into.prophet.merge(from.prophet);
      });
  report.reward = Estimate::from(st.reward, options.z);
  report.prophet = Estimate::from(st.prophet, options.z);
  report.bound = report.prophet.mean / (4.0 * static_cast<double>(report.k + 1));
  report.pass = report.reward.ci_low >= report.bound;
  return report;
}

// ---------------------------------------------------------------------------
// Nested sigma properties

SigmaPropsReport sigma_properties(const std::vector<std::size_t>& kappas, std::size_t seeds,
                                  std::size_t continuations, Rng& rng, double z) {
  if (seeds == 0) throw PreconditionError("sigma_properties: need at least one seed");
  SigmaPropsReport report;
  const std::size_t per_seed = (continuations + seeds - 1) / seeds;
  for (auto kappa : kappas) {
    if (kappa == 0 || 2 * kappa >= 32) throw PreconditionError("sigma_properties: kappa out of range");
    SigmaLevelReport level;
    level.kappa = kappa;
    level.d = std::size_t{1} << (2 * kappa);
    level.seeds = seeds;
    for (std::size_t s = 0; s < seeds; ++s) {
      Rng sr = rng.derive("sigma", kappa * 1000003 + s);
      const auto ns = pifam::sigma_prophet(level.d, kappa, sr);
      const auto structure = pifam::check_nested_structure(ns);
      if (!structure.passed()) {
        ++level.structure_failures;
        for (const auto& v : structure.violations) {
          level.violations.push_back("seed " + std::to_string(s) + ": " + v);
        }
      }
      Rng cr = sr.derive("continuations");
      const auto counts = pifam::level_increase_counts(ns, per_seed, cr);
      if (level.frequencies.empty()) {
        level.frequencies = counts;
        for (auto& f : level.frequencies) f.hits = f.trials = 0;
      }
      for (std::size_t i = 0; i < counts.size(); ++i) {
        level.frequencies[i].hits += counts[i].hits;
        level.frequencies[i].trials += counts[i].trials;
      }
    }
    for (auto& f : level.frequencies) {
      f.within_bounds = pifam::frequency_within(f, z);
      if (!f.within_bounds) {
        level.violations.push_back("(iii) levels " + std::to_string(f.level) + "->" +
                                   std::to_string(f.level_prime) + ": " + std::to_string(f.hits) +
                                   "/" + std::to_string(f.trials) + " vs " +
                                   std::to_string(f.expected));
      }
    }
    if (!level.violations.empty()) report.pass = false;
    report.levels.push_back(std::move(level));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Prophet benchmarks

namespace {

class WeightSampler {
 public:
  WeightSampler(std::size_t n, const PairwiseWeights& w) : family_(w.q, n), scale_(w.scale) {
    if (!scale_.empty() && scale_.size() != n) {
      throw PreconditionError("pairwise weights: " + std::to_string(scale_.size()) +
                              " scales for " + std::to_string(n) + " elements");
    }
    for (double s : scale_) {
      if (!(s >= 0.0)) throw PreconditionError("pairwise weights: negative scale");
    }
  }

  std::vector<double> sample(Rng& rng) const {
    const auto x = family_.sample(rng);
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      w[i] = (static_cast<double>(x[i]) + 1.0) * (scale_.empty() ? 1.0 : scale_[i]);
    }
    return w;
  }

 private:
  pifam::PairwiseUniform family_;
  std::vector<double> scale_;
};

std::vector<std::vector<double>> aux_weights(const WeightSampler& sampler, std::size_t aux,
                                             Rng& rng) {
  if (aux == 0) throw PreconditionError("prophet benchmark: need auxiliary samples");
  const Rng base = rng.derive("aux");
  std::vector<std::vector<double>> out;
  out.reserve(aux);
  for (std::size_t i = 0; i < aux; ++i) {
    Rng r = base.derive("sample", i);
    out.push_back(sampler.sample(r));
  }
  return out;
}

void finish(ProphetRatioReport& r, const PairAccumulator& acc, double z) {
  r.gambler = Estimate::from(Accumulator{acc.count, acc.sx, acc.sxx}, z);
  r.prophet = Estimate::from(Accumulator{acc.count, acc.sy, acc.syy}, z);
  r.ratio = Estimate::ratio(acc, z);
  r.pass = r.ratio.ci_high >= r.target;
}

}  // namespace

ProphetRatioReport single_choice_benchmark(std::size_t n, const PairwiseWeights& weights,
                                           std::uint64_t trials, std::size_t aux, Rng& rng,
                                           const RunOptions& options) {
  const WeightSampler sampler(n, weights);
  std::vector<double> maxima;
  for (const auto& w : aux_weights(sampler, aux, rng)) {
    maxima.push_back(*std::max_element(w.begin(), w.end()));
  }
  const double tau = schemes::calibrate_threshold(std::move(maxima));
  const matroid::UniformMatroid m(1, n);
  const Rng base = rng.derive("single-choice");
  const auto acc = run_trials(
      trials, options.threads, PairAccumulator{},
      [&](PairAccumulator& a, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto w = sampler.sample(tr);
        const auto pick = schemes::single_choice_prophet(w, tau);
        std::vector<std::uint32_t> ids(n);
        std::iota(ids.begin(), ids.end(), 0U);
        const double prophet =
            matroid::weighted_rank(m, std::span<const std::uint32_t>(ids), std::span<const double>(w))
                .value;
        a.add(pick ? w[*pick] : 0.0, prophet);
      },
      [](PairAccumulator& into, const PairAccumulator& from) { into.merge(from); });
  ProphetRatioReport r;
  r.name = "single-choice(n=" + std::to_string(n) + ")";
  r.target = 1.0 / 3.0;
  r.thresholds = 1;
  finish(r, acc, options.z);
  return r;
}

ProphetRatioReport graphic_partition_benchmark(const matroid::GraphicMatroid& g,
                                               const PairwiseWeights& weights,
                                               std::uint64_t trials, std::size_t aux, Rng& rng,
                                               const RunOptions& options, const TraceFn& trace) {
  const std::size_t n = g.num_edges();
  const WeightSampler sampler(n, weights);
  struct State {
    PairAccumulator acc;
    schemes::PartitionProphet prophet;
  };
  const State init{{}, schemes::PartitionProphet(aux_weights(sampler, aux, rng))};
  const Rng base = rng.derive("graphic-partition");
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0U);
  const auto st = run_trials(
      trials, trace ? 1 : options.threads, init,
      [&](State& s, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto w = sampler.sample(tr);
        Rng pr = tr.derive("partition");
        const auto partition = matroid::sample_graphic_partition(g, pr);
        std::vector<std::uint32_t> order = ids;
        Rng orr = tr.derive("order");
        shuffle(order.begin(), order.end(), orr);
        const auto picked = s.prophet.run(g, partition, order, w);
        double reward = 0.0;
        for (auto e : picked) reward += w[e];
        if (trace) {
          for (auto e : order) {
            trace(t, e, w[e], std::find(picked.begin(), picked.end(), e) != picked.end());
          }
        }
        const double prophet =
            matroid::weighted_rank(g, std::span<const std::uint32_t>(ids), std::span<const double>(w))
                .value;
        s.acc.add(reward, prophet);
      },
      [](State& into, const State& from) { into.acc.merge(from.acc); });
  ProphetRatioReport r;
  r.name = "graphic-partition(V=" + std::to_string(g.vertices()) + ",E=" + std::to_string(n) + ")";
  r.target = 1.0 / 6.0;
  r.thresholds = st.prophet.cached_parts();
  finish(r, st.acc, options.z);
  return r;
}

// ---------------------------------------------------------------------------
// Partition matroid certificate

CertifierReport partition_certificate(const PartitionCertificateParams& params, double target,
                                      std::uint64_t trials, Rng& rng, const RunOptions& options) {
  const std::size_t n = params.parts * params.part_size;
  if (n == 0) throw PreconditionError("partition certificate: empty ground set");
  const pifam::PairwiseUniform family(params.q, n);
  std::vector<std::vector<std::uint32_t>> parts(params.parts);
  for (std::uint32_t e = 0; e < n; ++e) parts[e / params.part_size].push_back(e);
  const matroid::SimplePartitionMatroid m(parts);

  using F = Family<std::uint32_t>;
  std::vector<F> families;
  families.push_back({"ground set", [](std::uint32_t) { return true; }});
  Rng fr = rng.derive("families");
  for (std::size_t i = 0; i < params.random_subsets; ++i) {
    auto in = std::make_shared<std::vector<bool>>(n);
    for (std::size_t e = 0; e < n; ++e) (*in)[e] = fr.bernoulli(0.5);
    families.push_back({"random subset " + std::to_string(i), [in](std::uint32_t e) { return (*in)[e]; }});
  }
  for (std::size_t p = 0; p < params.parts; ++p) {
    const std::size_t size = params.part_size;
    families.push_back({"part " + std::to_string(p), [p, size](std::uint32_t e) { return e / size == p; }});
  }
  for (std::size_t i = 0; i < params.random_unions; ++i) {
    auto in = std::make_shared<std::vector<bool>>(params.parts);
    for (std::size_t p = 0; p < params.parts; ++p) (*in)[p] = fr.bernoulli(0.5);
    const std::size_t size = params.part_size;
    families.push_back({"union of parts " + std::to_string(i),
                        [in, size](std::uint32_t e) { return (*in)[e / size]; }});
  }
  const auto active_below = params.active_below;
  const std::function<std::vector<std::uint32_t>(Rng&)> sampler = [&family, active_below](Rng& r) {
    const auto x = family.sample(r);
    std::vector<std::uint32_t> a;
    for (std::uint32_t e = 0; e < x.size(); ++e) {
      if (x[e] < active_below) a.push_back(e);
    }
    return a;
  };
  return certify_balance(sampler, m, target, families, trials, rng, options);
}

CertifierReport crs_certificate(const instances::CrsInstance& instance, double target,
                                std::size_t flats, std::size_t subsets, std::uint64_t trials,
                                Rng& rng, const RunOptions& options) {
  const std::size_t d = instance.d();
  const auto q = instance.q();
  using F = Family<matroid::LabeledVector>;
  std::vector<F> families;
  families.push_back({"ground set", [](const matroid::LabeledVector&) { return true; }});
  for (std::uint32_t l = 1; l <= d; ++l) {
    families.push_back({"label " + std::to_string(l),
                        [l](const matroid::LabeledVector& e) { return e.label == l; }});
  }
  Rng fr = rng.derive("families");
  for (std::size_t i = 0; i < flats; ++i) {
    auto basis = std::make_shared<gf::LinearBasis>(d, q);
    const auto r = 1 + fr.uniform_below(d > 1 ? d - 1 : 1);
    while (basis->rank() < r) basis->insert(gf::Vector::random(d, q, fr));
    families.push_back({"flat " + std::to_string(i) + " (rank " + std::to_string(r) + ")",
                        [basis](const matroid::LabeledVector& e) { return basis->in_span(e.vector); }});
  }
  for (std::size_t i = 0; i < subsets; ++i) {
    const auto key = fr.next_u64();
    families.push_back({"random subset " + std::to_string(i),
                        [key](const matroid::LabeledVector& e) {
                          return (mix64(key ^ matroid::LabeledVectorHash{}(e)) & 1) != 0;
                        }});
  }
  const std::function<std::vector<matroid::LabeledVector>(Rng&)> sampler = [&instance](Rng& r) {
    return materialize(instance.sample(r), instance.d(), instance.q());
  };
  return certify_balance(sampler, instance.matroid(), target, families, trials, rng, options);
}

// ---------------------------------------------------------------------------
// OCRS balance

std::uint64_t element_id(const matroid::LabeledVector& e, std::uint64_t class_size) {
  return (std::uint64_t{e.label} - 1) * class_size + e.vector.index();
}

std::vector<matroid::LabeledVector> materialize(const pifam::ActiveSet& a, std::size_t d,
                                                gf::Residue q) {
  std::vector<matroid::LabeledVector> out = a.explicit_elements;
  if (a.full_blocks.empty()) return out;
  const std::uint64_t classes = gf::checked_pow(q, d);
  if (classes == 0 || classes > (std::uint64_t{1} << 20)) {
    throw PreconditionError("materialize: q^d too large to expand a full block");
  }
  for (auto label : a.full_blocks) {
    for (std::uint64_t i = 0; i < classes; ++i) {
      out.push_back({gf::Vector::from_index(i, d, q), label});
    }
  }
  return out;
}

OcrsBalanceReport ocrs_balance(const instances::CrsInstance& instance, std::uint64_t trials,
                               Rng& rng, const OcrsOptions& options) {
  const auto& m = instance.matroid();
  const std::uint64_t classes = instance.class_size();
  if (classes == 0 || classes * instance.d() > (std::uint64_t{1} << 24)) {
    throw PreconditionError("ocrs_balance: q^d d exceeds the dense element table");
  }
  const auto ids = static_cast<std::size_t>(classes * instance.d());
  const std::size_t orders = options.orders.size();
  OcrsBalanceReport report;
  report.coin_probability =
      options.coin_probability.value_or(schemes::ocrs_coin_probability(m.full_rank()));
  report.target = 1.0 / (4.0 * static_cast<double>(m.full_rank()));

  struct State {
    std::vector<std::uint32_t> active;
    std::vector<std::uint32_t> selected;  // orders x ids
  };
  const Rng base = rng.derive("ocrs");
  const auto st = run_trials(
      trials, options.threads,
      State{std::vector<std::uint32_t>(ids, 0), std::vector<std::uint32_t>(orders * ids, 0)},
      [&](State& s, std::uint64_t t) {
        Rng tr = base.derive("trial", t);
        const auto a = instance.sample(tr);
        const auto elements = materialize(a, instance.d(), instance.q());
        if (elements.empty()) return;
        const schemes::PrecommittedCoins coins(tr.derive("coins").key(), report.coin_probability);
        std::vector<std::uint64_t> id(elements.size());
        std::unique_ptr<bool[]> heads(new bool[elements.size()]);
        std::unique_ptr<bool[]> all(new bool[elements.size()]);
        for (std::size_t i = 0; i < elements.size(); ++i) {
          id[i] = element_id(elements[i], classes);
          heads[i] = coins.heads(id[i]);
          all[i] = true;
          ++s.active[id[i]];
        }
        const std::span<const bool> head_span(heads.get(), elements.size());
        std::vector<matroid::LabeledVector> stream(elements.size());
        std::vector<bool> permuted_heads_storage;
        std::unique_ptr<bool[]> permuted(new bool[elements.size()]);
        for (std::size_t o = 0; o < orders; ++o) {
          const auto perm = schemes::adversary_order(options.orders[o], elements, head_span);
          for (std::size_t i = 0; i < perm.size(); ++i) {
            stream[i] = elements[perm[i]];
            permuted[i] = heads[perm[i]];
          }
          const auto picked = schemes::greedy_ocrs(
              m, std::span<const matroid::LabeledVector>(stream),
              std::span<const bool>(all.get(), elements.size()),
              std::span<const bool>(permuted.get(), elements.size()));
          for (auto i : picked) ++s.selected[o * ids + id[perm[i]]];
        }
      },
      [](State& into, const State& from) {
        for (std::size_t i = 0; i < into.active.size(); ++i) into.active[i] += from.active[i];
        for (std::size_t i = 0; i < into.selected.size(); ++i) into.selected[i] += from.selected[i];
      });

  for (std::size_t o = 0; o < orders; ++o) {
    AdversaryBalance b;
    b.order = schemes::to_string(options.orders[o]);
    bool first = true;
    for (std::size_t e = 0; e < ids; ++e) {
      const auto n = st.active[e];
      if (n == 0) continue;
      if (e % classes == 0) {
        ++b.loops;
        b.loop_balance = std::max(b.loop_balance, static_cast<double>(st.selected[o * ids + e]) / n);
        continue;
      }
      if (n < options.min_occurrences) {
        ++b.insufficient;
        continue;
      }
      ++b.eligible;
      const auto est = Estimate::proportion(st.selected[o * ids + e], n, options.z);
      b.refuted += est.ci_high < report.target;
      if (first || est.ci_low < b.min_balance.ci_low) {
        b.min_balance = est;
        b.worst_element = e;
      }
      b.min_point = first ? est.mean : std::min(b.min_point, est.mean);
      first = false;
    }
    if (b.eligible > 0 && b.min_balance.ci_low < report.target) report.pass = false;
    report.adversaries.push_back(std::move(b));
  }
  return report;
}

}  // namespace pwsel::verify
