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

#include "pwsel/pifam.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "json.hpp"

namespace pwsel::pifam {
namespace {

using nlohmann::json;

void choose_columns(const gf::FieldMatrix& sigma, std::size_t k, std::size_t start,
                    std::vector<std::size_t>& picked, bool& ok) {
  if (!ok) return;
  if (picked.size() == k) {
    gf::LinearBasis basis(sigma.rows(), sigma.modulus());
    for (std::size_t c : picked) {
      if (!basis.insert(sigma.column(c))) {
        ok = false;
        return;
      }
    }
    return;
  }
  for (std::size_t c = start; c < sigma.cols(); ++c) {
    picked.push_back(c);
    choose_columns(sigma, k, c + 1, picked, ok);
    picked.pop_back();
  }
}

// Appends levels partitions.size()+1 .. kappa.
void extend_partitions(std::vector<std::vector<std::vector<std::uint32_t>>>& partitions,
                       std::size_t kappa, Rng& rng) {
  while (partitions.size() < kappa) {
    const auto& prev = partitions.back();
    std::vector<std::uint32_t> pick(prev.size());
    std::iota(pick.begin(), pick.end(), std::uint32_t{0});
    shuffle(pick.begin(), pick.end(), rng);
    pick.resize(prev.size() / 2);
    std::sort(pick.begin(), pick.end());
    std::vector<std::vector<std::uint32_t>> next;
    next.reserve(pick.size() / 2);
    for (std::size_t i = 0; i + 1 < pick.size(); i += 2) {
      std::vector<std::uint32_t> merged = prev[pick[i]];
      merged.insert(merged.end(), prev[pick[i + 1]].begin(), prev[pick[i + 1]].end());
      std::sort(merged.begin(), merged.end());
      next.push_back(std::move(merged));
    }
    partitions.push_back(std::move(next));
  }
}

void require_level(const NestedSigma& ns, std::size_t level) {
  if (level < 1 || level > ns.kappa) {
    throw PreconditionError("level " + std::to_string(level) + " outside [1, " +
                            std::to_string(ns.kappa) + "]");
  }
}

json matrix_json(const gf::FieldMatrix& m) { return m.to_rows(); }

gf::FieldMatrix matrix_from_json(const json& rows, std::uint64_t q) {
  return gf::FieldMatrix::from_rows(rows.get<std::vector<std::vector<gf::Residue>>>(), q);
}

}  // namespace

OrderedFamily ordered_family(const gf::FieldMatrix& sigma, std::size_t d, Rng& rng) {
  if (d < sigma.rows()) {
    throw PreconditionError("ordered_family: output dimension " + std::to_string(d) +
                            " is below sigma's " + std::to_string(sigma.rows()) + " rows");
  }
  OrderedFamily out;
  out.seed = rng.key();
  out.sigma = sigma;
  out.R = gf::random_matrix(d, sigma.rows(), sigma.modulus(), rng);
  out.X = gf::matrix_multiply(out.R, sigma);
  return out;
}

bool columns_kwise_independent(const gf::FieldMatrix& sigma, std::size_t k) {
  k = std::min(k, sigma.cols());
  if (k == 0) return true;
  std::vector<std::size_t> picked;
  bool ok = true;
  choose_columns(sigma, k, 0, picked, ok);
  return ok;
}

std::uint64_t projective_count(std::uint64_t q, std::size_t m) {
  constexpr std::uint64_t kCap = std::uint64_t{1} << 63;
  std::uint64_t total = 0, power = 1;
  for (std::size_t i = 0; i < m; ++i) {
    total = std::min(kCap, total + power);
    power = power > kCap / q ? kCap : power * q;
  }
  return total;
}

std::vector<gf::Vector> projective_columns(std::uint64_t q, std::size_t m, std::size_t n) {
  gf::require_modulus(q);
  if (n > projective_count(q, m)) {
    throw PreconditionError("projective_columns: only " + std::to_string(projective_count(q, m)) +
                            " pairwise independent directions in GF(" + std::to_string(q) +
                            ")^" + std::to_string(m) + ", asked for " + std::to_string(n));
  }
  const auto qr = static_cast<gf::Residue>(q);
  std::vector<gf::Vector> out;
  out.reserve(n);
  for (std::size_t lead = m; lead-- > 0 && out.size() < n;) {
    const std::size_t tail = m - 1 - lead;
    const std::uint64_t count = gf::checked_pow(q, tail);
    for (std::uint64_t t = 0; out.size() < n && (count == 0 || t < count); ++t) {
      gf::Vector v(m, qr);
      v.set(lead, 1);
      std::uint64_t rest = t;
      for (std::size_t i = m; i-- > lead + 1;) {
        v.set(i, static_cast<gf::Residue>(rest % q));
        rest /= q;
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

gf::FieldMatrix sigma_crs(std::uint64_t q, std::size_t c, std::size_t d) {
  gf::require_modulus(q);
  if (c == 0 || projective_count(q, c) < d) {
    throw PreconditionError("sigma_crs: need d <= (q^c - 1)/(q - 1) pairwise independent columns, got q=" +
                            std::to_string(q) + " c=" + std::to_string(c) + " d=" + std::to_string(d));
  }
  const auto cols = projective_columns(q, c, d);
  return gf::FieldMatrix::from_columns(cols, c);
}

PairwiseUniform::PairwiseUniform(std::uint64_t q, std::size_t n) {
  gf::require_modulus(q);
  if (n > q + 1) {
    throw PreconditionError("pairwise scalars: n = " + std::to_string(n) + " exceeds q + 1");
  }
  q_ = static_cast<gf::Residue>(q);
  for (const auto& col : projective_columns(q, 2, n)) {
    a_.push_back(col.get(0));
    b_.push_back(col.get(1));
  }
}

std::vector<gf::Residue> PairwiseUniform::sample(Rng& rng) const {
  const auto r0 = static_cast<gf::Residue>(rng.uniform_below(q_));
  const auto r1 = static_cast<gf::Residue>(rng.uniform_below(q_));
  std::vector<gf::Residue> x(a_.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = gf::add_mod(gf::mul_mod(r0, a_[i], q_), gf::mul_mod(r1, b_[i], q_), q_);
  }
  return x;
}

bool ActiveSet::contains(const matroid::LabeledVector& e) const {
  if (std::binary_search(full_blocks.begin(), full_blocks.end(), e.label)) return true;
  return std::find(explicit_elements.begin(), explicit_elements.end(), e) !=
         explicit_elements.end();
}

double ActiveSet::cardinality(double class_size) const {
  return static_cast<double>(explicit_elements.size()) +
         static_cast<double>(full_blocks.size()) * class_size;
}

bool rare_event(std::uint64_t q, std::size_t dim, std::uint64_t numerator, Rng& rng) {
  const std::uint64_t total = gf::checked_pow(q, dim);
  if (total != 0) {
    if (numerator >= total) return true;
    return rng.uniform_below(total) < numerator;
  }
  if (numerator != 1) {
    throw PreconditionError("rare_event: q^d overflows and numerator is not 1");
  }
  // All dim digits zero; stop at the first nonzero digit.
  for (std::size_t i = 0; i < dim; ++i) {
    if (rng.uniform_below(q) != 0) return false;
  }
  return true;
}

ActiveSet matrix_to_set(std::span<const gf::Vector> columns, std::span<const std::uint32_t> labels,
                        Rng& rng, MixtureWeight weight) {
  if (columns.size() != labels.size()) {
    throw PreconditionError("matrix_to_set: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(columns.size()) + " columns");
  }
  ActiveSet out;
  if (columns.empty()) return out;
  const std::size_t dim = columns.front().dim();
  const gf::Residue q = columns.front().modulus();
  const std::uint64_t classes = gf::checked_pow(q, dim);
  if (classes != 0 && columns.size() >= classes) {
    throw PreconditionError("matrix_to_set: n = " + std::to_string(columns.size()) +
                            " must be below q^d = " + std::to_string(classes));
  }
  for (auto label : labels) {
    if (label < 1) throw PreconditionError("matrix_to_set: labels must be positive");
  }
  if (rare_event(q, dim, weight.numerator, rng)) {
    out.branch = Branch::kD2;
    for (auto label : labels) {
      if (rare_event(q, dim, 1, rng)) out.full_blocks.push_back(label);
    }
    std::sort(out.full_blocks.begin(), out.full_blocks.end());
    return out;
  }
  out.explicit_elements.reserve(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].dim() != dim) throw PreconditionError("matrix_to_set: ragged columns");
    out.explicit_elements.push_back({columns[i], labels[i]});
  }
  return out;
}

ActiveSet matrix_to_set(const gf::FieldMatrix& X, std::span<const std::uint32_t> labels, Rng& rng,
                        MixtureWeight weight) {
  const auto cols = X.columns();
  return matrix_to_set(std::span<const gf::Vector>(cols), labels, rng, weight);
}

std::size_t active_rank(const ActiveSet& a, const matroid::DuplicatedLinearMatroid& m) {
  return m.rank_with_blocks(a.explicit_elements, a.full_blocks.size());
}

ExactMixtureReport exact_mixture_deviation(std::span<const std::vector<gf::Vector>> tapes,
                                           std::span<const std::uint32_t> labels,
                                           std::span<const std::uint32_t> groups,
                                           MixtureWeight weight) {
  const std::size_t n = labels.size();
  if (tapes.empty() || groups.size() != n) {
    throw PreconditionError("exact_mixture_deviation: need tapes and one group per label");
  }
  {
    std::vector<std::uint32_t> sorted(labels.begin(), labels.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw PreconditionError("exact_mixture_deviation: labels must be distinct");
    }
  }
  const std::size_t dim = tapes.front().empty() ? 0 : tapes.front().front().dim();
  const gf::Residue q = tapes.front().empty() ? 2 : tapes.front().front().modulus();
  const std::uint64_t Q = gf::checked_pow(q, dim);
  if (Q == 0 || Q * n > 4096) {
    throw PreconditionError("exact_mixture_deviation: ground set too large to enumerate");
  }
  const std::size_t classes = static_cast<std::size_t>(Q);
  // single[i][v], joint[(i, j)][v][u] for i < j.
  std::vector<std::uint64_t> single(n * classes, 0);
  std::vector<std::uint64_t> joint(n * n * classes * classes, 0);
  std::vector<std::size_t> idx(n);
  for (const auto& tape : tapes) {
    if (tape.size() != n) throw PreconditionError("exact_mixture_deviation: ragged tape");
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
  const Rational w = Rational(weight.numerator) / Q;
  const Rational inv_q = Rational(1) / Q;
  const Rational target = inv_q * inv_q;
  auto marginal = [&](std::size_t i, std::size_t v) {
    return (1 - w) * Rational(single[i * classes + v]) / T + w * inv_q;
  };
  ExactMixtureReport report;
  report.elements = n * classes;
  auto absr = [](const Rational& r) { return r < 0 ? Rational(-r) : r; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < classes; ++v) {
      report.max_marginal_deviation =
          std::max(report.max_marginal_deviation, absr(marginal(i, v) - inv_q));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t v = 0; v < classes; ++v) {
        for (std::size_t u = (i == j ? v + 1 : 0); u < classes; ++u) {
          Rational both;
          if (i == j) {
            both = w * inv_q;
          } else {
            const Rational nij(joint[((i * n + j) * classes + v) * classes + u]);
            if (groups[i] == groups[j]) {
              both = (1 - w) * nij / T + w * target;
            } else {
              const Rational ni(single[i * classes + v]), nj(single[j * classes + u]);
              both = (1 - w) * (1 - w) * nij / T + (1 - w) * w * inv_q * (ni + nj) / T +
                     w * w * target;
            }
          }
          report.max_target_deviation = std::max(report.max_target_deviation, absr(both - target));
          report.max_product_deviation =
              std::max(report.max_product_deviation, absr(both - marginal(i, v) * marginal(j, u)));
          ++report.pairs;
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// NestedSigma

std::vector<std::uint32_t> NestedSigma::basis(std::size_t level) const {
  require_level(*this, level);
  std::vector<std::uint32_t> out;
  for (const auto& part : partitions[level - 1]) out.insert(out.end(), part.begin(), part.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t NestedSigma::part_of_column(std::size_t level, std::size_t c) const {
  require_level(*this, level);
  if (c >= num_columns(level)) throw PreconditionError("column index out of range");
  return c >> (level - 1);
}

std::vector<std::uint32_t> NestedSigma::column_support(std::size_t level, std::size_t c) const {
  const auto& part = partitions[level - 1][part_of_column(level, c)];
  const std::size_t width = std::size_t{1} << (level - 1);
  const std::size_t t = c & (width - 1);
  return {part.begin() + static_cast<std::ptrdiff_t>(t),
          part.begin() + static_cast<std::ptrdiff_t>(t + width)};
}

gf::Vector NestedSigma::column(std::size_t level, std::size_t c) const {
  gf::Vector v(d, 2);
  for (auto coord : column_support(level, c)) v.set(coord, 1);
  return v;
}

std::vector<gf::Vector> NestedSigma::columns(std::size_t level) const {
  std::vector<gf::Vector> out;
  out.reserve(num_columns(level));
  for (std::size_t c = 0; c < num_columns(level); ++c) out.push_back(column(level, c));
  return out;
}

gf::FieldMatrix NestedSigma::sigma(std::size_t level) const {
  const auto cols = columns(level);
  if (cols.empty()) return gf::FieldMatrix(d, 0, 2);
  return gf::FieldMatrix::from_columns(cols, d);
}

NestedSigma sigma_prophet(std::size_t d, std::size_t kappa, Rng& rng) {
  if (kappa < 1 || kappa > 31) throw PreconditionError("sigma_prophet: kappa must be in [1, 31]");
  if (d == 0 || !std::has_single_bit(d)) {
    throw PreconditionError("sigma_prophet: d = " + std::to_string(d) + " is not a power of two");
  }
  if (d < (std::size_t{1} << (2 * kappa - 1))) {
    throw PreconditionError("sigma_prophet: need d >= 2^(2 kappa - 1), got d=" +
                            std::to_string(d) + " kappa=" + std::to_string(kappa));
  }
  NestedSigma ns;
  ns.d = d;
  ns.kappa = kappa;
  ns.seed = rng.key();
  std::vector<std::vector<std::uint32_t>> first(d / 2);
  for (std::uint32_t j = 0; j < d / 2; ++j) first[j] = {2 * j, 2 * j + 1};
  ns.partitions.push_back(std::move(first));
  extend_partitions(ns.partitions, kappa, rng);
  return ns;
}

NestedSigma resample_after(const NestedSigma& ns, std::size_t level, Rng& rng) {
  require_level(ns, level);
  NestedSigma out;
  out.d = ns.d;
  out.kappa = ns.kappa;
  out.seed = ns.seed;
  out.partitions.assign(ns.partitions.begin(),
                        ns.partitions.begin() + static_cast<std::ptrdiff_t>(level));
  extend_partitions(out.partitions, ns.kappa, rng);
  return out;
}

NestedReport check_nested_structure(const NestedSigma& ns) {
  NestedReport report;
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    report.violations.push_back(std::move(msg));
  };
  std::unordered_set<gf::Vector, gf::VectorHash> seen;
  std::vector<std::uint32_t> previous;
  for (std::size_t l = 1; l <= ns.kappa; ++l) {
    const auto tag = "level " + std::to_string(l) + ": ";
    const auto b = ns.basis(l);
    const std::size_t want = ns.d >> (l - 1);
    if (b.size() != want || std::adjacent_find(b.begin(), b.end()) != b.end()) {
      fail(report.nested_bases, "(i) " + tag + "|B| = " + std::to_string(b.size()) +
                                    ", expected " + std::to_string(want) + " distinct");
    }
    if (l > 1 && !std::includes(previous.begin(), previous.end(), b.begin(), b.end())) {
      fail(report.nested_bases, "(i) " + tag + "B is not contained in the previous level");
    }
    for (const auto& part : ns.partitions[l - 1]) {
      if (part.size() != (std::size_t{1} << l)) {
        fail(report.part_sizes, tag + "part of size " + std::to_string(part.size()));
      }
    }
    std::vector<bool> alive(ns.d, false);
    for (auto coord : b) {
      if (coord < ns.d) alive[coord] = true;
    }
    gf::LinearBasis span(ns.d, 2);
    const std::size_t cols = ns.num_columns(l);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto support = ns.column_support(l, c);
      if (!std::all_of(support.begin(), support.end(), [&](auto x) { return alive[x]; })) {
        fail(report.full_rank_support, "(ii) " + tag + "column " + std::to_string(c) +
                                           " leaves span(B)");
      }
      auto v = ns.column(l, c);
      if (v.weight() != (std::size_t{1} << (l - 1))) {
        fail(report.column_weights, tag + "column " + std::to_string(c) + " has weight " +
                                        std::to_string(v.weight()));
      }
      span.insert(v);
      if (!seen.insert(std::move(v)).second) {
        fail(report.distinct_columns, "(iv) " + tag + "column " + std::to_string(c) +
                                          " repeats an earlier column");
      }
    }
    if (span.rank() != cols) {
      fail(report.full_rank_support, "(ii) " + tag + "rank " + std::to_string(span.rank()) +
                                         " below " + std::to_string(cols) + " columns");
    }
    previous = b;
  }
  return report;
}

std::vector<LevelPairFrequency> level_increase_counts(const NestedSigma& ns,
                                                      std::size_t continuations, Rng& rng) {
  std::vector<LevelPairFrequency> out;
  for (std::size_t l = 1; l < ns.kappa; ++l) {
    const auto c = rng.uniform_below(ns.num_columns(l));
    const auto support = ns.column_support(l, c);
    const std::size_t first = out.size();
    for (std::size_t lp = l + 1; lp <= ns.kappa; ++lp) {
      out.push_back({l, lp, 0, 0, std::ldexp(1.0, -static_cast<int>(lp - l)), true});
    }
    for (std::size_t t = 0; t < continuations; ++t) {
      const auto cont = resample_after(ns, l, rng);
      for (std::size_t lp = l + 1; lp <= ns.kappa; ++lp) {
        const auto b = cont.basis(lp);
        const bool hit = std::all_of(support.begin(), support.end(), [&](auto x) {
          return std::binary_search(b.begin(), b.end(), x);
        });
        auto& f = out[first + (lp - l - 1)];
        f.hits += hit;
        ++f.trials;
      }
    }
  }
  return out;
}

bool frequency_within(const LevelPairFrequency& f, double z) {
  if (f.trials == 0) return true;
  const double n = static_cast<double>(f.trials);
  const double se = std::sqrt(f.expected * (1.0 - f.expected) / n);
  return std::abs(static_cast<double>(f.hits) / n - f.expected) <= z * se;
}

NestedReport check_nested_properties(const NestedSigma& ns, std::size_t continuations, Rng& rng,
                                     double z) {
  auto report = check_nested_structure(ns);
  if (continuations == 0) return report;
  report.frequencies = level_increase_counts(ns, continuations, rng);
  for (auto& f : report.frequencies) {
    f.within_bounds = frequency_within(f, z);
    if (!f.within_bounds) {
      report.level_increase = false;
      report.violations.push_back(
          "(iii) levels " + std::to_string(f.level) + "->" + std::to_string(f.level_prime) + ": " +
          std::to_string(f.hits) + "/" + std::to_string(f.trials) + " vs " +
          std::to_string(f.expected));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

std::string to_json(const NestedSigma& ns) {
  json j;
  j["schema"] = 1;
  j["modulus"] = 2;
  j["d"] = ns.d;
  j["kappa"] = ns.kappa;
  j["seed"] = ns.seed;
  j["partitions"] = ns.partitions;
  json bases = json::array(), sigmas = json::array();
  for (std::size_t l = 1; l <= ns.kappa; ++l) {
    bases.push_back(ns.basis(l));
    sigmas.push_back(matrix_json(ns.sigma(l)));
  }
  j["bases"] = std::move(bases);
  j["sigmas"] = std::move(sigmas);
  return j.dump();
}

NestedSigma nested_sigma_from_json(std::string_view text) {
  NestedSigma ns;
  try {
    const auto j = json::parse(text);
    ns.d = j.at("d").get<std::size_t>();
    ns.kappa = j.at("kappa").get<std::size_t>();
    ns.seed = j.value("seed", std::uint64_t{0});
    ns.partitions = j.at("partitions").get<decltype(ns.partitions)>();
    if (ns.partitions.size() != ns.kappa) throw PreconditionError("partition count != kappa");
    for (const auto& level : ns.partitions) {
      for (const auto& part : level) {
        for (auto coord : part) {
          if (coord >= ns.d) throw PreconditionError("coordinate outside [0, d)");
        }
      }
    }
    const auto report = check_nested_structure(ns);
    if (!report.passed()) throw PreconditionError(report.violations.front());
    if (j.contains("sigmas")) {
      const auto& sigmas = j.at("sigmas");
      for (std::size_t l = 1; l <= ns.kappa; ++l) {
        if (matrix_from_json(sigmas.at(l - 1), 2) != ns.sigma(l)) {
          throw PreconditionError("sigma " + std::to_string(l) + " disagrees with partitions");
        }
      }
    }
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("nested sigma json: ") + e.what());
  }
  return ns;
}

std::string to_json(const OrderedFamily& family) {
  json j;
  j["schema"] = 1;
  j["modulus"] = family.X.modulus();
  j["seed"] = family.seed;
  j["X"] = matrix_json(family.X);
  j["sigma"] = matrix_json(family.sigma);
  j["R"] = matrix_json(family.R);
  return j.dump();
}

OrderedFamily ordered_family_from_json(std::string_view text) {
  OrderedFamily out;
  try {
    const auto j = json::parse(text);
    const auto q = j.at("modulus").get<std::uint64_t>();
    out.seed = j.value("seed", std::uint64_t{0});
    out.X = matrix_from_json(j.at("X"), q);
    out.sigma = matrix_from_json(j.at("sigma"), q);
    out.R = matrix_from_json(j.at("R"), q);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("ordered family json: ") + e.what());
  }
  if (gf::matrix_multiply(out.R, out.sigma) != out.X) {
    throw PreconditionError("ordered family json: X != R * sigma");
  }
  return out;
}

}  // namespace pwsel::pifam
