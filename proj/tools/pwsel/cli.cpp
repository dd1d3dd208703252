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

#include "pwsel/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pwsel/instances.hpp"
#include "pwsel/matroid.hpp"
#include "pwsel/pifam.hpp"
#include "pwsel/verify.hpp"

#ifndef PWSEL_VERSION
#define PWSEL_VERSION "0.0.0"
#endif

namespace pwsel::cli {
namespace {

using json = nlohmann::ordered_json;
using stats::Estimate;

struct Common {
  std::uint64_t trials = 0;
  std::uint64_t seed = 1;
  double confidence = 3.0;
  std::string output = "-";
  std::string format = "json";
  std::size_t threads = 1;
  std::string config;
};

struct Row {
  std::string name;
  Estimate value;
  double target = std::nan("");
  bool pass = true;
};

struct Result {
  json body = json::object();
  std::vector<Row> table;
  std::vector<std::string> notes;
  bool pass = true;
};

json to_json(const Estimate& e) {
  return {{"mean", e.mean},       {"trials", e.trials},   {"std_error", e.std_error},
          {"ci_low", e.ci_low},   {"ci_high", e.ci_high}, {"z", e.z}};
}

std::string to_string(const pifam::Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("PWSEL_SEED"); s && *s) {
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 0);
    if (end && *end == '\0') return v;
  }
  return 1;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Commands. Each fills `config` with its resolved parameters.

struct Command {
  CLI::App* app = nullptr;
  std::function<Result(const Common&, json& config)> run;
};

Result crs_hardness(const Common& c, json& config, std::uint64_t q, std::size_t d, std::size_t cc,
                    std::uint64_t naive) {
  config.update({{"q", q}, {"d", d}, {"c", cc}, {"naive_trials", naive}});
  Rng rng(c.seed);
  const auto r = verify::crs_hardness_gap(q, d, cc, c.trials, rng, {c.threads, c.confidence}, naive);
  Result out;
  out.body = {{"rank_d1", to_json(r.rank_d1)},
              {"rank_d2_exact", r.rank_d2},
              {"rank", to_json(r.rank)},
              {"expected_size", to_string(r.expected_size)},
              {"ratio", to_json(r.ratio)},
              {"bound", r.bound},
              {"vacuous", r.vacuous},
              {"d1_rank_violations", r.d1_rank_violations}};
  if (naive > 0) {
    out.body["naive_rank"] = to_json(r.naive_rank);
    out.body["naive_agrees"] = r.naive_agrees;
  }
  const bool size_ok = r.expected_size == static_cast<long long>(d);
  out.table.push_back({"E[Rank(A)]", r.rank, static_cast<double>(cc + 1), r.rank.ci_high <= cc + 1.0});
  out.table.push_back({"ratio", r.ratio, r.bound, r.ratio.ci_high <= r.bound});
  if (naive > 0) out.table.push_back({"naive E[Rank(A)]", r.naive_rank, r.rank.mean, r.naive_agrees});
  if (r.vacuous) out.notes.push_back("bound (c+1)/d >= 1 is vacuous");
  if (!size_ok) out.notes.push_back("E|A| != d");
  out.pass = size_ok && r.naive_agrees;
  for (const auto& row : out.table) out.pass = out.pass && row.pass;
  return out;
}

Result prophet_hardness(const Common& c, json& config, std::size_t kappa, std::size_t d,
                        std::size_t aux) {
  if (d == 0) d = std::size_t{1} << std::min<std::size_t>(2 * kappa, 62);
  config.update({{"kappa", kappa}, {"d", d}, {"bucketing_aux", aux}});
  Rng rng(c.seed);
  verify::ProphetGapOptions o;
  o.threads = c.threads;
  o.z = c.confidence;
  o.bucketing_aux = aux;
  const auto r = verify::prophet_hardness_gap(d, kappa, c.trials, rng, o);
  Result out;
  json policies = json::array();
  out.table.push_back({"prophet", r.prophet, r.stated_prophet_bound,
                       r.prophet.ci_low >= r.stated_prophet_bound});
  for (const auto& p : r.policies) {
    policies.push_back({{"name", p.name}, {"reward", to_json(p.reward)}});
    out.table.push_back({p.name, p.reward, r.gambler_bound * 1.02,
                         p.reward.ci_high <= r.gambler_bound * 1.02});
  }
  const auto& best = r.policies[r.best_policy];
  const bool ratio_ok = best.reward.ci_low <= r.ratio_bound * r.prophet.ci_high;
  out.body = {{"off_grid", r.off_grid},
              {"rejections", r.rejections},
              {"prophet", to_json(r.prophet)},
              {"stated_prophet_bound", r.stated_prophet_bound},
              {"proof_prophet_bound", r.proof_prophet_bound},
              {"gambler_bound", r.gambler_bound},
              {"policies", std::move(policies)},
              {"best_policy", best.name},
              {"ratio", r.ratio},
              {"ratio_bound", r.ratio_bound},
              {"suite_only", true}};
  out.notes.push_back("gambler bound is witnessed by the policy suite only, not all gamblers");
  if (r.off_grid) out.notes.push_back("d != 2^(2 kappa): guarantees assume d = 2^(2 kappa)");
  out.pass = ratio_ok;
  for (const auto& row : out.table) out.pass = out.pass && row.pass;
  return out;
}

Result pi_test(const Common& c, json& config, bool exact, bool unordered, std::uint64_t q,
               std::size_t d, std::size_t m, std::size_t n, std::uint64_t numerator,
               bool duplicate, std::size_t kappa) {
  Result out;
  if (exact) {
    if (d == 0) d = verify::ExactParams{}.d;
    config.update({{"exact", true}, {"construction", unordered ? "unordered" : "ordered"},
                   {"q", q}, {"d", d}, {"m", m}, {"n", n}, {"weight_numerator", numerator},
                   {"duplicate_column", duplicate}});
    verify::ExactParams p;
    p.q = q;
    p.d = d;
    p.m = m;
    p.n = n;
    p.weight.numerator = numerator;
    p.duplicate_sigma_column = duplicate;
    const auto r = verify::exact_pairwise_check(
        unordered ? verify::Construction::kUnordered : verify::Construction::kOrdered, p);
    out.body = {{"max_deviation", to_string(r.max_deviation)},
                {"max_marginal_deviation", to_string(r.max_marginal_deviation)},
                {"max_target_deviation", to_string(r.max_target_deviation)},
                {"tapes", r.tapes},
                {"pairs", r.pairs}};
    out.pass = r.max_deviation == 0;
    out.table.push_back({"max deviation", Estimate::exact(r.max_deviation.convert_to<double>()), 0.0,
                         out.pass});
    return out;
  }
  if (d == 0) d = std::size_t{1} << std::min<std::size_t>(2 * kappa, 62);
  config.update({{"exact", false}, {"kappa", kappa}, {"d", d}});
  Rng rng(c.seed);
  instances::WeightTestOptions o;
  o.threads = c.threads;
  const auto r = instances::pairwise_weight_test(d, kappa, c.trials, rng, o);
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"labels", {p.label_a, p.label_b}}, {"levels", {p.level_a, p.level_b}},
                     {"statistic", p.statistic}, {"dof", p.dof}, {"p_value", p.p_value},
                     {"rejected", p.rejected}});
    auto pv = Estimate::exact(p.p_value);
    pv.trials = r.trials;
    out.table.push_back({"p-value " + std::to_string(p.label_a) + "," + std::to_string(p.label_b),
                         pv, r.corrected_alpha, !p.rejected});
  }
  out.body = {{"case1_violations", r.case1_violations},
              {"alpha", r.alpha},
              {"corrected_alpha", r.corrected_alpha},
              {"rejected", r.rejected},
              {"pairs", std::move(pairs)}};
  out.pass = r.passed();
  return out;
}

Result ocrs_bench(const Common& c, json& config, std::uint64_t q, std::size_t d, std::size_t cc,
                  double coin, std::uint64_t min_occ, bool strict) {
  config.update({{"q", q}, {"d", d}, {"c", cc}, {"min_occurrences", min_occ}, {"strict", strict}});
  if (coin >= 0) config["coin_probability"] = coin;
  const instances::CrsInstance inst(q, d, cc);
  verify::OcrsOptions o;
  o.threads = c.threads;
  o.z = c.confidence;
  o.min_occurrences = min_occ;
  if (coin >= 0) o.coin_probability = coin;
  Rng rng(c.seed);
  const auto r = verify::ocrs_balance(inst, c.trials, rng, o);
  json adv = json::array();
  for (const auto& a : r.adversaries) {
    adv.push_back({{"order", a.order}, {"eligible", a.eligible}, {"insufficient", a.insufficient},
                   {"loops", a.loops}, {"loop_balance", a.loop_balance},
                   {"min_balance", to_json(a.min_balance)}, {"worst_element", a.worst_element},
                   {"min_point", a.min_point}, {"refuted", a.refuted}});
  }
  Result out;
  out.body = {{"coin_probability", r.coin_probability}, {"target", r.target},
              {"adversaries", std::move(adv)}};
  out.pass = true;
  for (const auto& a : r.adversaries) {
    const bool ok = a.refuted == 0 && (!strict || a.min_balance.ci_low >= r.target);
    out.table.push_back({a.order, a.min_balance, r.target, ok});
    out.pass = out.pass && ok;
  }
  out.notes.push_back("zero vectors are loops and are reported apart from the minimum");
  if (!strict) out.notes.push_back("verdict fails only when some element's CI upper bound is below target");
  return out;
}

std::vector<double> read_scales(const std::string& path, std::optional<matroid::EdgeList>& graph) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open graph file " + path);
  graph.emplace(matroid::read_edge_list(in));
  return graph->weights;
}

using Trace = std::unique_ptr<std::ofstream>;

Trace open_trace(const std::string& path) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw PreconditionError("cannot open trace file " + path);
  return f;
}

Result prophet_bench(const Common& c, json& config, std::size_t n, std::uint64_t q, std::size_t aux,
                     std::size_t kappa, std::size_t d) {
  config.update({{"n", n}, {"q", q}, {"aux", aux}});
  Rng rng(c.seed);
  const verify::RunOptions opts{c.threads, c.confidence};
  verify::PairwiseWeights w;
  w.q = q;
  const auto r = verify::single_choice_benchmark(n, w, c.trials, aux, rng, opts);
  Result out;
  out.body["single_choice"] = {{"gambler", to_json(r.gambler)}, {"prophet", to_json(r.prophet)},
                               {"ratio", to_json(r.ratio)}, {"target", r.target}};
  out.table.push_back({r.name, r.ratio, r.target, r.ratio.ci_low >= r.target});
  if (kappa > 0) {
    if (d == 0) d = std::size_t{1} << std::min<std::size_t>(2 * kappa, 62);
    config.update({{"kappa", kappa}, {"d", d}});
    Rng br = rng.derive("bucketing");
    const auto b = verify::bucketing_gap(d, kappa, c.trials, aux, br, opts);
    out.body["bucketing"] = {{"k", b.k},
                             {"rank", b.rank},
                             {"opt_estimate", b.opt_estimate},
                             {"opt_std_error", b.opt_std_error},
                             {"best_bucket", b.best_bucket},
                             {"bucket_opt", b.bucket_opt},
                             {"reward", to_json(b.reward)},
                             {"prophet", to_json(b.prophet)},
                             {"bound", b.bound}};
    out.table.push_back({"bucketing reward", b.reward, b.bound, b.pass});
  }
  out.pass = true;
  for (const auto& row : out.table) out.pass = out.pass && row.pass;
  return out;
}

Result partition_bench(const Common& c, json& config, std::size_t vertices,
                       const std::string& graph_path, std::uint64_t q, std::size_t aux,
                       const std::string& trace_path) {
  std::optional<matroid::EdgeList> file;
  verify::PairwiseWeights w;
  w.q = q;
  if (!graph_path.empty()) {
    w.scale = read_scales(graph_path, file);
    config["graph"] = graph_path;
  } else {
    config["vertices"] = vertices;
  }
  config.update({{"q", q}, {"aux", aux}});
  const auto g = file ? file->graph : matroid::GraphicMatroid::complete(vertices);
  auto trace = open_trace(trace_path);
  verify::TraceFn fn;
  if (trace) {
    config["trace"] = trace_path;
    fn = [&](std::uint64_t t, std::uint32_t e, double weight, bool accepted) {
      *trace << json{{"trial", t}, {"element", e}, {"weight", weight}, {"accepted", accepted}}.dump()
             << '\n';
    };
  }
  Rng rng(c.seed);
  const auto r = verify::graphic_partition_benchmark(g, w, c.trials, aux, rng,
                                                     {c.threads, c.confidence}, fn);
  Result out;
  out.body = {{"gambler", to_json(r.gambler)}, {"prophet", to_json(r.prophet)},
              {"ratio", to_json(r.ratio)},     {"target", r.target},
              {"edges", g.num_edges()},         {"cached_thresholds", r.thresholds}};
  out.table.push_back({r.name, r.ratio, r.target, r.ratio.ci_low >= r.target});
  out.pass = out.table.back().pass;
  return out;
}

Result sigma_props(const Common& c, json& config, const std::vector<std::size_t>& kappas,
                   std::size_t seeds, std::size_t continuations) {
  config.update({{"kappa", kappas}, {"seeds", seeds}, {"continuations", continuations}});
  Rng rng(c.seed);
  const auto r = verify::sigma_properties(kappas, seeds, continuations, rng, c.confidence);
  Result out;
  json levels = json::array();
  for (const auto& l : r.levels) {
    json freq = json::array();
    for (const auto& f : l.frequencies) {
      freq.push_back({{"level", f.level}, {"level_prime", f.level_prime}, {"hits", f.hits},
                      {"trials", f.trials}, {"expected", f.expected},
                      {"within_bounds", f.within_bounds}});
      out.table.push_back({"kappa=" + std::to_string(l.kappa) + " (iii) " + std::to_string(f.level) +
                               "->" + std::to_string(f.level_prime),
                           Estimate::proportion(f.hits, f.trials, c.confidence), f.expected,
                           f.within_bounds});
    }
    levels.push_back({{"kappa", l.kappa}, {"d", l.d}, {"seeds", l.seeds},
                      {"structure_failures", l.structure_failures}, {"frequencies", std::move(freq)},
                      {"violations", l.violations}});
    for (const auto& v : l.violations) out.notes.push_back(v);
  }
  out.body = {{"levels", std::move(levels)}};
  out.pass = r.pass;
  return out;
}

Result certify(const Common& c, json& config, const std::string& instance, double target,
               std::size_t parts, std::size_t part_size, std::uint64_t q, std::uint64_t below,
               std::size_t d, std::size_t cc) {
  config.update({{"instance", instance}, {"target", target}});
  Rng rng(c.seed);
  const verify::RunOptions opts{c.threads, c.confidence};
  verify::CertifierReport r;
  if (q == 0) q = instance == "partition" ? 101 : 5;
  if (instance == "partition") {
    config.update({{"parts", parts}, {"part_size", part_size}, {"q", q}, {"active_below", below}});
    verify::PartitionCertificateParams p;
    p.parts = parts;
    p.part_size = part_size;
    p.q = q;
    p.active_below = below;
    r = verify::partition_certificate(p, target, c.trials, rng, opts);
  } else {
    config.update({{"q", q}, {"d", d}, {"c", cc}});
    const instances::CrsInstance inst(q, d, cc);
    r = verify::crs_certificate(inst, target, 5, 5, c.trials, rng, opts);
  }
  Result out;
  json fam = json::array();
  for (const auto& f : r.families) {
    fam.push_back({{"family", f.description}, {"ratio", to_json(f.ratio)},
                   {"rank", to_json(f.rank)}, {"size", to_json(f.size)}, {"tested", f.tested}});
    out.table.push_back({f.description, f.ratio, target, !f.tested || f.ratio.ci_high >= target});
  }
  out.body = {{"target", target}, {"families", std::move(fam)},
              {"min_family", r.min_ratio.description}, {"min_ratio", to_json(r.min_ratio.ratio)},
              {"verdict", r.pass ? "pass" : "fail"}};
  out.notes.push_back("a pass is evidence for the tested families only; a fail is conclusive");
  out.pass = r.pass;
  return out;
}

// ---------------------------------------------------------------------------
// Output

std::string num(double x) {
  if (std::isnan(x)) return "-";
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

void write_text(std::ostream& os, const json& header, const Result& r) {
  os << "command  " << header["command"].get<std::string>() << '\n'
     << "version  " << header["version"].get<std::string>() << '\n'
     << "seed     " << header["seed"].get<std::uint64_t>() << '\n'
     << "config   " << header["config"].dump() << '\n'
     << "verdict  " << (r.pass ? "pass" : "fail") << "\n\n";
  std::vector<std::vector<std::string>> cells = {
      {"name", "mean", "std_error", "ci_low", "ci_high", "trials", "target", "pass"}};
  for (const auto& row : r.table) {
    cells.push_back({row.name, num(row.value.mean), num(row.value.std_error),
                     num(row.value.ci_low), num(row.value.ci_high),
                     std::to_string(row.value.trials), num(row.target), row.pass ? "yes" : "no"});
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i == 0) {
        os << std::left << std::setw(static_cast<int>(width[i])) << line[i];
      } else {
        os << "  " << std::right << std::setw(static_cast<int>(width[i])) << line[i];
      }
    }
    os << '\n';
  }
  for (const auto& n : r.notes) os << "note: " << n << '\n';
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void write_csv(std::ostream& os, const Result& r) {
  os << "name,mean,std_error,ci_low,ci_high,trials,target,pass\n";
  os << std::setprecision(17);
  for (const auto& row : r.table) {
    os << csv_field(row.name) << ',' << row.value.mean << ',' << row.value.std_error << ','
       << row.value.ci_low << ',' << row.value.ci_high << ',' << row.value.trials << ','
       << (std::isnan(row.target) ? std::string() : num(row.target)) << ','
       << (row.pass ? "true" : "false") << '\n';
  }
}

// Flags from a JSON config file fill options left unset on the command line.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw PreconditionError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw PreconditionError("config " + path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = it.key();
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "command" || key == "config") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw PreconditionError("config " + path + ": unknown key '" + it.key() + "'");
    }
    if (opt->count() > 0) continue;
    const auto& v = it.value();
    auto add = [&](const json& x) {
      if (x.is_string()) {
        opt->add_result(x.get<std::string>());
      } else if (x.is_boolean()) {
        opt->add_result(x.get<bool>() ? "true" : "false");
      } else {
        opt->add_result(x.dump());
      }
    };
    if (v.is_array()) {
      for (const auto& x : v) add(x);
    } else {
      add(v);
    }
    opt->run_callback();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pairwise-independent selection experiments", "pwsel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(PWSEL_VERSION));

  Common common;
  common.seed = default_seed();
  common.threads = std::max(1U, std::thread::hardware_concurrency());

  std::map<std::string, Command> commands;
  auto add_common = [&](CLI::App* sub, std::uint64_t trials) {
    common.trials = trials;
    sub->add_option("--trials", common.trials, "Monte Carlo trials")->capture_default_str();
    sub->add_option("--seed", common.seed, "Seed (default from PWSEL_SEED, else 1)")
        ->capture_default_str();
    sub->add_option("--confidence", common.confidence, "CI half-width in standard errors")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--output", common.output, "Output path, - for stdout")->capture_default_str();
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--config", common.config, "JSON file of flag values; flags override it");
  };
  // Default trials depend on the subcommand, so they are applied after parsing.
  std::map<std::string, std::uint64_t> default_trials;

  struct Params {
    std::uint64_t q = 0;
    std::size_t d = 0, c = 0, m = 2, n = 3, kappa = 0, seeds = 100, continuations = 10000;
    std::size_t aux = 10000, vertices = 4, parts = 10, part_size = 10;
    std::uint64_t naive = 0, numerator = 1, min_occ = 30, below = 10;
    double coin = -1.0, target = 0.0;
    bool exact = false, unordered = false, duplicate = false, strict = false;
    std::string graph, trace, instance = "partition";
    std::vector<std::size_t> kappas = {2, 3, 4};
  };
  // One parameter set per subcommand; defaults differ between them.
  std::map<std::string, Params> params;

  auto& crs = params["crs-hardness"];
  auto sub_crs = app.add_subcommand("crs-hardness", "CRS hardness gap on the GF(q)^d instance");
  add_common(sub_crs, 100000);
  sub_crs->add_option("--q", crs.q)->default_val(5);
  sub_crs->add_option("--d", crs.d)->default_val(5);
  sub_crs->add_option("--c", crs.c)->default_val(2);
  sub_crs->add_option("--naive-trials", crs.naive, "Unstratified cross-check trials")->default_val(0);
  default_trials["crs-hardness"] = 100000;

  auto& ph = params["prophet-hardness"];
  auto sub_ph = app.add_subcommand("prophet-hardness", "Prophet vs gambler suite on the nested instance");
  add_common(sub_ph, 1000);
  sub_ph->add_option("--kappa", ph.kappa)->default_val(4);
  sub_ph->add_option("--d", ph.d, "Dimension, default 2^(2 kappa)")->default_val(0);
  sub_ph->add_option("--bucketing-aux", ph.aux, "Auxiliary samples for the bucketing policy, 0 to skip")
      ->default_val(0);
  default_trials["prophet-hardness"] = 1000;

  auto& pi = params["pi-test"];
  auto sub_pi = app.add_subcommand("pi-test", "Pairwise independence tests");
  add_common(sub_pi, 100000);
  sub_pi->add_flag("--exact", pi.exact, "Exhaustive tape enumeration");
  sub_pi->add_flag("--unordered", pi.unordered, "Mixture construction instead of the ordered family");
  sub_pi->add_option("--q", pi.q)->default_val(2);
  sub_pi->add_option("--d", pi.d, "Dimension; Monte Carlo default 2^(2 kappa)")->default_val(0);
  sub_pi->add_option("--m", pi.m)->default_val(2);
  sub_pi->add_option("--n", pi.n)->default_val(3);
  sub_pi->add_option("--kappa", pi.kappa, "Monte Carlo weight test on the nested instance")
      ->default_val(3);
  sub_pi->add_option("--weight-numerator", pi.numerator, "Mixture weight numerator / q^d")
      ->default_val(1);
  sub_pi->add_flag("--duplicate-column", pi.duplicate, "Repeat a sigma column (mutation)");
  default_trials["pi-test"] = 100000;

  auto& ocrs = params["ocrs-bench"];
  auto sub_ocrs = app.add_subcommand("ocrs-bench", "Greedy OCRS balance under adversarial orders");
  add_common(sub_ocrs, 100000);
  sub_ocrs->add_option("--q", ocrs.q)->default_val(5);
  sub_ocrs->add_option("--d", ocrs.d)->default_val(5);
  sub_ocrs->add_option("--c", ocrs.c)->default_val(2);
  sub_ocrs->add_option("--coin", ocrs.coin, "Coin probability, default 1/(2 Rank)")->default_val(-1.0);
  sub_ocrs->add_option("--min-occurrences", ocrs.min_occ)->default_val(30);
  sub_ocrs->add_flag("--strict", ocrs.strict, "Require every CI lower bound to reach the target");
  default_trials["ocrs-bench"] = 100000;

  auto& pb = params["prophet-bench"];
  auto sub_pb = app.add_subcommand("prophet-bench", "Single-choice prophet, optional bucketing prophet");
  add_common(sub_pb, 100000);
  sub_pb->add_option("--n", pb.n, "Elements in the rank-one benchmark")->default_val(20);
  sub_pb->add_option("--q", pb.q, "Field size of the weight family")->default_val(101);
  sub_pb->add_option("--aux", pb.aux, "Auxiliary calibration samples")->default_val(10000);
  sub_pb->add_option("--kappa", pb.kappa, "Also run the bucketing prophet at this kappa")->default_val(0);
  sub_pb->add_option("--d", pb.d)->default_val(0);
  default_trials["prophet-bench"] = 100000;

  auto& part = params["partition-bench"];
  auto sub_part = app.add_subcommand("partition-bench", "Graphic matroid via random simple partitions");
  add_common(sub_part, 100000);
  sub_part->add_option("--vertices", part.vertices, "Complete graph size")->default_val(4);
  sub_part->add_option("--graph", part.graph, "Edge list file; weights scale the edge values");
  sub_part->add_option("--q", part.q)->default_val(101);
  sub_part->add_option("--aux", part.aux)->default_val(10000);
  sub_part->add_option("--trace", part.trace, "Line-delimited JSON decision log (forces one thread)");
  default_trials["partition-bench"] = 100000;

  auto& sig = params["sigma-props"];
  auto sub_sig = app.add_subcommand("sigma-props", "Properties of the nested sigma system");
  add_common(sub_sig, 0);
  sub_sig->add_option("--kappa", sig.kappas)->expected(1, 8);
  sub_sig->add_option("--seeds", sig.seeds)->default_val(100);
  sub_sig->add_option("--continuations", sig.continuations, "Pooled over seeds")->default_val(10000);
  default_trials["sigma-props"] = 0;

  auto& cert = params["certify"];
  auto sub_cert = app.add_subcommand("certify", "Balance certificate over structured families");
  add_common(sub_cert, 100000);
  sub_cert->add_option("--instance", cert.instance)
      ->check(CLI::IsMember({"partition", "crs"}))
      ->default_val("partition");
  sub_cert->add_option("--target", cert.target, "Default (1/1.299)(1 - 1/e)")
      ->default_val((1.0 / 1.299) * (1.0 - std::exp(-1.0)));
  sub_cert->add_option("--parts", cert.parts)->default_val(10);
  sub_cert->add_option("--part-size", cert.part_size)->default_val(10);
  sub_cert->add_option("--q", cert.q, "Default 101 for partition, 5 for crs")->default_val(0);
  sub_cert->add_option("--active-below", cert.below)->default_val(10);
  sub_cert->add_option("--d", cert.d)->default_val(5);
  sub_cert->add_option("--c", cert.c)->default_val(2);
  default_trials["certify"] = 100000;

  for (auto* sub : app.get_subcommands({})) {
    for (auto* opt : sub->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
  sub_sig->get_option("--kappa")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitPass : kExitUsage;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (sub->get_option("--trials")->count() == 0) common.trials = default_trials[name];

  json config = json::object();
  Result result;
  Params& p = params[name];
  try {
    if (!common.config.empty()) {
      apply_config(*sub, common.config);
      config["config"] = common.config;
    }
    if (name != "sigma-props" && common.trials == 0) {
      throw PreconditionError("--trials must be positive");
    }
    if (!p.trace.empty()) common.threads = 1;
    config.update({{"trials", common.trials}, {"confidence", common.confidence}});
    if (name == "crs-hardness") {
      result = crs_hardness(common, config, p.q, p.d, p.c, p.naive);
    } else if (name == "prophet-hardness") {
      result = prophet_hardness(common, config, p.kappa, p.d, p.aux);
    } else if (name == "pi-test") {
      result = pi_test(common, config, p.exact, p.unordered, p.q, p.d, p.m, p.n, p.numerator,
                       p.duplicate, p.kappa);
    } else if (name == "ocrs-bench") {
      result = ocrs_bench(common, config, p.q, p.d, p.c, p.coin, p.min_occ, p.strict);
    } else if (name == "prophet-bench") {
      result = prophet_bench(common, config, p.n, p.q, p.aux, p.kappa, p.d);
    } else if (name == "partition-bench") {
      result = partition_bench(common, config, p.vertices, p.graph, p.q, p.aux, p.trace);
    } else if (name == "sigma-props") {
      result = sigma_props(common, config, p.kappas, p.seeds, p.continuations);
    } else {
      result = certify(common, config, p.instance, p.target, p.parts, p.part_size, p.q, p.below,
                       p.d, p.c);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << name << ": " << e.what() << '\n';
    return kExitFail;
  }

  json header = {{"command", name},
                 {"config", config},
                 {"seed", common.seed},
                 {"version", PWSEL_VERSION},
                 {"timestamp", utc_now()}};

  std::ofstream file;
  std::ostream* sink = &out;
  if (common.output != "-") {
    file.open(common.output);
    if (!file) {
      err << "error: cannot open " << common.output << '\n';
      return kExitUsage;
    }
    sink = &file;
  }
  if (common.format == "json") {
    json doc = {{"schema", 1},
                {"header", header},
                {"body", result.body},
                {"notes", result.notes},
                {"verdict", result.pass ? "pass" : "fail"}};
    *sink << doc.dump(2) << '\n';
  } else if (common.format == "csv") {
    write_csv(*sink, result);
  } else {
    write_text(*sink, header, result);
  }
  return result.pass ? kExitPass : kExitFail;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pwsel::cli
