// Copyright 2026 The slwe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slwe/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slwe/attack.hpp"
#include "slwe/instance.hpp"
#include "slwe/profile.hpp"
#include "slwe/reduction.hpp"
#include "slwe/rlwe.hpp"
#include "slwe/stattest.hpp"

namespace slwe::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::size_t default_jobs() {
  if (const char* env = std::getenv(kJobsEnv)) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Replay record: the exact arguments plus the resolved configuration.
void write_run_record(const fs::path& dir, const std::vector<std::string>& args,
                      const json& config) {
  write_json(dir / "run.json", json{{"args", args}, {"config", config}});
}

std::int64_t modulus_from(int logq, std::int64_t q) {
  if (q != 0) return q;
  if (logq < 2 || logq > 41) throw InvalidArgument("--logq must lie in [2, 41]");
  return std::int64_t{1} << logq;
}

struct GenOptions {
  std::size_t n = 0;
  int logq = 0;
  std::int64_t q = 0;
  std::size_t h = 0;
  double sigma_e = 3.0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  bool rlwe = false;
  bool with_truth = false;
  std::string out;
};

int cmd_gen(const GenOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  LweParams p;
  p.n = o.n;
  p.q = modulus_from(o.logq, o.q);
  p.h = o.h;
  p.sigma_e = o.sigma_e;
  p.m_total = o.m;
  p.validate();
  static_cast<void>(p.modulus());
  Rng rng = Rng::derive(o.seed, 0);
  const Secret s = gen_secret(p.n, p.h, rng);
  const fs::path dir(o.out);
  if (o.rlwe) {
    RlweInstance inst = gen_rlwe(p, s, rng);
    inst.lwe.seed = o.seed;
    save_instance(dir, inst, o.with_truth);
  } else {
    LweInstance inst = gen_lwe(p, s, rng);
    inst.seed = o.seed;
    save_instance(dir, inst, o.with_truth);
  }
  write_run_record(dir, args, json{{"params", p}, {"seed", o.seed}, {"rlwe", o.rlwe}});
  out << json{{"instance", dir.string()}, {"n", p.n}, {"q", p.q}, {"h", p.h}}.dump() << '\n';
  return kExitOk;
}

struct ReduceOptions {
  std::string instance;
  std::string out;
  std::size_t count = 1;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
  std::int64_t omega = 10;
  std::optional<double> tau;
  std::size_t stall_window = 3;
  double stall_epsilon = 0.001;
  double delta = 0.99;
  std::size_t rows = 0;
  std::size_t max_runs = 64;
  std::string external;
  std::optional<int> beta1;
  std::optional<int> beta2;
};

int cmd_reduce(const ReduceOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  if (o.count == 0) throw InvalidArgument("--count must be positive");
  if (o.beta1.has_value() != o.beta2.has_value()) {
    throw InvalidArgument("--beta1 and --beta2 must be given together");
  }
  ReductionConfig c;
  c.omega = o.omega;
  c.tau = o.tau;
  c.stall_window = o.stall_window;
  c.stall_epsilon = o.stall_epsilon;
  c.lll_delta = o.delta;
  c.subsample_m = o.rows;
  c.max_phase_runs = o.max_runs;
  if (!o.external.empty()) c.external_reducer = o.external;
  if (o.beta1) c.block_sizes = std::make_pair(*o.beta1, *o.beta2);
  c.validate();

  const fs::path src(o.instance);
  LweInstance inst =
      is_rlwe_instance(src) ? load_rlwe_instance(src).lwe : load_instance(src);
  inst.params.omega = c.omega;
  auto items = dataset_factory(inst, c, o.count, o.jobs, o.seed);
  std::vector<ReducedDataset> datasets;
  for (auto& item : items) {
    if (!item.dataset) {
      throw std::runtime_error("matrix " + std::to_string(item.index) + ": " + item.error);
    }
    datasets.push_back(std::move(*item.dataset));
  }
  const fs::path dir(o.out);
  save_datasets(dir, datasets);
  write_run_record(dir, args,
                   json{{"instance", o.instance}, {"count", o.count}, {"seed", o.seed},
                        {"reduction", c}});
  json summary{{"datasets", dir.string()}, {"count", datasets.size()}};
  json rhos = json::array();
  for (const auto& ds : datasets) rhos.push_back(ds.rho);
  summary["rho"] = rhos;
  out << summary.dump() << '\n';
  return kExitOk;
}

struct ProfileOptions {
  std::string dataset;
  std::string instance;
  std::string out;
  std::string csv;
  double threshold = kCruelThreshold;
};

json profile_report(const ColumnProfile& prof) {
  json j = prof;
  const VarianceIdentity vi = variance_identity(prof);
  j["variance_identity"] = {{"measured", vi.measured},
                            {"predicted", vi.predicted},
                            {"relative_gap", vi.relative_gap}};
  return j;
}

int cmd_profile(const ProfileOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto datasets = load_datasets(o.dataset);
  const SamplePool pool = pool_samples(datasets);
  const Modulus q(datasets.front().params.q);
  ColumnProfile prof = profile(pool.A, q, o.threshold);
  if (!o.instance.empty()) {
    const LweInstance inst = load_instance(o.instance);
    if (inst.secret) prof.sigma_e_ratio = estimate_sigma_e(pool.A, pool.b, *inst.secret, q);
  }
  const json report = profile_report(prof);
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    write_json(dir / "profile.json", report);
    write_run_record(dir, args, json{{"dataset", o.dataset}, {"threshold", o.threshold}});
  }
  if (!o.csv.empty()) {
    const fs::path path(o.csv);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot write " + path.string());
    write_profile_csv(csv, prof);
  }
  out << report.dump() << '\n';
  return kExitOk;
}

struct AttackOptions {
  std::string dataset;
  std::string instance;
  std::string out;
  std::size_t max_weight = 4;
  std::size_t top_k = 64;
  std::uint64_t eval_interval = 40000000;
  std::size_t batch_size = 4096;
  std::size_t jobs = 1;
  std::string alpha = "1e-9";
  std::string beta = "1e-2";
  std::size_t samples = 0;
  std::size_t greedy_samples = 0;
  double threshold = kCruelThreshold;
  std::size_t stride = 1;
};

SearchConfig search_config(const AttackOptions& o) {
  SearchConfig c;
  c.max_weight = o.max_weight;
  c.top_k = o.top_k;
  c.eval_interval = o.eval_interval;
  c.batch_size = o.batch_size;
  c.M_bruteforce = o.samples;
  c.M_greedy = o.greedy_samples;
  c.jobs = o.jobs;
  c.validate();
  return c;
}

TestConfig test_config(const AttackOptions& o) {
  TestConfig t;
  t.alpha = parse_real(o.alpha);
  t.beta = parse_real(o.beta);
  t.validate();
  return t;
}

int finish_attack(const AttackOptions& o, const std::vector<std::string>& args,
                  const AttackReport& report, json config, std::ostream& out) {
  const json j = report;
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    write_json(dir / "report.json", j);
    write_run_record(dir, args, config);
  }
  out << j.dump() << '\n';
  return report.recovered ? kExitOk : kExitNotRecovered;
}

int cmd_attack(const AttackOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const SearchConfig sc = search_config(o);
  const TestConfig tc = test_config(o);
  const auto datasets = load_datasets(o.dataset);
  const LweInstance inst = load_instance(o.instance);
  const SamplePool pool = pool_samples(datasets);
  const ColumnProfile prof = profile(pool.A, inst.params.modulus(), o.threshold);
  const AttackData data = prepare_attack_data(datasets, prof, inst.params);
  const AttackReport report = run_attack(data, inst.A, inst.b, sc, tc);
  json config{{"dataset", o.dataset},   {"instance", o.instance}, {"search", sc},
              {"alpha", tc.alpha},      {"beta", tc.beta},        {"threshold", o.threshold}};
  return finish_attack(o, args, report, std::move(config), out);
}

int cmd_rlwe_attack(const AttackOptions& o, const std::vector<std::string>& args,
                    std::ostream& out) {
  const SearchConfig sc = search_config(o);
  const TestConfig tc = test_config(o);
  const auto datasets = load_datasets(o.dataset);
  const RlweInstance inst = load_rlwe_instance(o.instance);
  const SamplePool pool = pool_samples(datasets);
  const ColumnProfile prof = profile(pool.A, inst.lwe.params.modulus(), o.threshold);
  const AttackReport report = run_rlwe_attack(datasets, inst, prof, sc, tc, o.stride);
  json config{{"dataset", o.dataset}, {"instance", o.instance}, {"search", sc},
              {"alpha", tc.alpha},    {"beta", tc.beta},        {"threshold", o.threshold},
              {"stride", o.stride}};
  return finish_attack(o, args, report, std::move(config), out);
}

struct EstimateOptions {
  std::size_t n = 0;
  int logq = 0;
  std::optional<std::size_t> nu;
  std::size_t h = 0;
  std::optional<double> rho;
  std::optional<double> sigma_r;
  std::optional<double> sigma_e;
  std::string alpha = "2^-128";
  std::string beta = "1e-5";
  bool worst = false;
  bool average = false;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
  SampleSizeQuery query;
  query.n = o.n;
  query.log2q = o.logq;
  query.h = o.h;
  query.alpha = parse_real(o.alpha);
  query.beta = parse_real(o.beta);
  const auto ref = find_reference(o.n, o.logq);
  if (o.nu) {
    query.n_u = *o.nu;
  } else if (ref) {
    query.n_u = ref->n_u;
  } else {
    throw InvalidArgument("--nu is required without a reference dataset for (n, logq)");
  }
  query.sigma_r_ratio = o.sigma_r;
  if (o.rho) {
    query.rho = o.rho;
  } else if (ref && !o.sigma_r) {
    query.rho = ref->rho;
  }
  if (!query.rho && !query.sigma_r_ratio) {
    throw InvalidArgument("--rho or --sigma-r is required without a reference dataset");
  }
  if (o.sigma_e) {
    query.sigma_e_ratio = *o.sigma_e;
  } else if (ref) {
    query.sigma_e_ratio = ref->sigma_e_ratio;
  } else {
    throw InvalidArgument("--sigma-e is required without a reference dataset for (n, logq)");
  }
  const SampleSizeEstimate est = estimate_sample_sizes(query);
  json j{{"n", query.n},
         {"logq", query.log2q},
         {"nu", query.n_u},
         {"h", query.h},
         {"alpha", query.alpha},
         {"beta", query.beta},
         {"sigma_e_ratio", query.sigma_e_ratio},
         {"estimate", est}};
  const bool both = o.worst == o.average;
  if (!both) {
    const auto& m = o.worst ? est.M_worst : est.M_average;
    j["case"] = o.worst ? "worst" : "average";
    j["M"] = m ? json(*m) : json(nullptr);
  }
  out << j.dump() << '\n';
  return kExitOk;
}

struct EstimateRlweOptions {
  std::size_t n = 0;
  std::size_t nu = 0;
  std::size_t h_min = 1;
  std::size_t h_max = 0;
  std::size_t secrets = 10000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_estimate_rlwe(const EstimateRlweOptions& o, std::ostream& out) {
  if (o.nu == 0 || o.nu > o.n) throw InvalidArgument("--nu must lie in [1, n]");
  const std::size_t h_max = o.h_max == 0 ? std::min<std::size_t>(o.n, 32) : o.h_max;
  if (o.h_min == 0 || o.h_min > h_max || h_max > o.n) {
    throw InvalidArgument("need 1 <= h-min <= h-max <= n");
  }
  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.out.empty()) {
    const fs::path path(o.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    sink = &file;
  }
  *sink << "n,nu,h,T_lwe,T_rlwe,ratio\n";
  const RlweCostModel model;
  for (std::size_t h = o.h_min; h <= h_max; ++h) {
    Rng rng = Rng::derive(o.seed, h);
    const CostEstimate e = estimate_costs(model, o.n, o.nu, h, o.secrets, rng);
    *sink << o.n << ',' << o.nu << ',' << h << ',' << static_cast<double>(e.T_lwe) << ','
          << static_cast<double>(e.T_rlwe) << ',' << static_cast<double>(e.ratio) << '\n';
  }
  return kExitOk;
}

void add_attack_options(CLI::App* sub, AttackOptions& o) {
  sub->add_option("--dataset", o.dataset, "Dataset directory from `reduce`")->required();
  sub->add_option("--instance", o.instance, "Instance directory from `gen`")->required();
  sub->add_option("--out", o.out, "Directory for report.json and run.json");
  sub->add_option("--max-weight", o.max_weight, "Largest cruel weight enumerated");
  sub->add_option("--top-k", o.top_k, "Candidates kept for greedy completion");
  sub->add_option("--eval-interval", o.eval_interval, "Candidates between evaluations");
  sub->add_option("--batch-size", o.batch_size, "Candidates per scoring batch");
  sub->add_option("--jobs", o.jobs, "Worker threads")->default_val(default_jobs());
  sub->add_option("--alpha", o.alpha, "Type-I error (accepts B^E)");
  sub->add_option("--beta", o.beta, "Type-II error (accepts B^E)");
  sub->add_option("--samples", o.samples, "Brute-force samples M; 0 derives it");
  sub->add_option("--greedy-samples", o.greedy_samples, "Greedy samples; 0 uses the pool");
  sub->add_option("--threshold", o.threshold, "Cruel column threshold as a fraction of q/sqrt(12)");
}

}  // namespace

double parse_real(const std::string& text) {
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidArgument("not a number: '" + text + "'");
    return v;
  };
  const auto caret = text.find('^');
  if (caret == std::string::npos) return to_double(text);
  return std::pow(to_double(text.substr(0, caret)), to_double(text.substr(caret + 1)));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-secret LWE cryptanalysis toolkit", "slwe"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate an LWE or RLWE instance");
  g->add_option("--n", gen.n, "Dimension")->required();
  g->add_option("--logq", gen.logq, "log2 of a power-of-two modulus");
  g->add_option("--q", gen.q, "Explicit modulus");
  g->add_option("--h", gen.h, "Secret Hamming weight")->required();
  g->add_option("--sigma-e", gen.sigma_e, "Error standard deviation");
  g->add_option("--m", gen.m, "Public samples; 0 means 4n");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_flag("--rlwe", gen.rlwe, "Ring instance over Z_q[x]/(x^n+1)");
  g->add_flag("--with-truth", gen.with_truth, "Also write secret.mat and e.mat");
  g->add_option("--out", gen.out, "Output directory")->required();

  ReduceOptions red;
  auto* r = app.add_subcommand("reduce", "Reduce subsampled embeddings into datasets");
  r->add_option("--instance", red.instance, "Instance directory")->required();
  r->add_option("--out", red.out, "Output directory")->required();
  r->add_option("--count", red.count, "Number of reduced matrices");
  r->add_option("--jobs", red.jobs, "Worker threads")->default_val(default_jobs());
  r->add_option("--seed", red.seed, "Seed");
  r->add_option("--omega", red.omega, "Embedding penalty");
  r->add_option("--tau", red.tau, "Stop once rho <= tau");
  r->add_option("--stall-window", red.stall_window, "Runs averaged for stall detection");
  r->add_option("--stall-epsilon", red.stall_epsilon, "Minimum average rho gain per run");
  r->add_option("--delta", red.delta, "LLL delta");
  r->add_option("--rows", red.rows, "Subsampled rows; 0 means round(0.875 n)");
  r->add_option("--max-runs", red.max_runs, "Run cap per phase episode");
  r->add_option("--external-reducer", red.external, "Command run as CMD IN.mat OUT.mat");
  r->add_option("--beta1", red.beta1, "First block size forwarded to the external reducer");
  r->add_option("--beta2", red.beta2, "Second block size forwarded to the external reducer");

  ProfileOptions prof;
  auto* p = app.add_subcommand("profile", "Column profile of reduced datasets");
  p->add_option("--dataset", prof.dataset, "Dataset directory")->required();
  p->add_option("--instance", prof.instance, "Instance with ground truth, for the error ratio");
  p->add_option("--out", prof.out, "Directory for profile.json");
  p->add_option("--csv", prof.csv, "Per-column stdev CSV path");
  p->add_option("--threshold", prof.threshold, "Cruel column threshold");

  AttackOptions att;
  auto* a = app.add_subcommand("attack", "Cruel brute force plus greedy cool recovery");
  add_attack_options(a, att);

  AttackOptions ratt;
  auto* ra = app.add_subcommand("rlwe-attack", "Attack over negacyclic rotations");
  add_attack_options(ra, ratt);
  ra->add_option("--stride", ratt.stride, "Rotation step")->check(CLI::PositiveNumber);

  EstimateOptions est;
  auto* e = app.add_subcommand("estimate", "Brute-force sample size estimate");
  e->add_option("--n", est.n, "Dimension")->required();
  e->add_option("--logq", est.logq, "log2 q")->required();
  e->add_option("--nu", est.nu, "Cruel column count");
  e->add_option("--h", est.h, "Secret Hamming weight")->required();
  e->add_option("--rho", est.rho, "Reduction factor");
  e->add_option("--sigma-r", est.sigma_r, "sigma_r / sigma_u, overrides --rho");
  e->add_option("--sigma-e", est.sigma_e, "sigma_e / sigma_u");
  e->add_option("--alpha", est.alpha, "Type-I error (accepts B^E)");
  e->add_option("--beta", est.beta, "Type-II error (accepts B^E)");
  e->add_flag("--worst", est.worst, "Report the worst case h_r = h");
  e->add_flag("--average", est.average, "Report the average case h_r = h n_r / n");

  EstimateRlweOptions er;
  auto* x = app.add_subcommand("estimate-rlwe", "RLWE versus LWE brute-force cost table (CSV)");
  x->add_option("--n", er.n, "Dimension")->required();
  x->add_option("--nu", er.nu, "Cruel column count")->required();
  x->add_option("--h-min", er.h_min, "Smallest Hamming weight");
  x->add_option("--h-max", er.h_max, "Largest Hamming weight; 0 means min(n, 32)");
  x->add_option("--secrets", er.secrets, "Secrets sampled per weight");
  x->add_option("--seed", er.seed, "Seed");
  x->add_option("--out", er.out, "CSV path; stdout when absent");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, args, out);
    if (r->parsed()) return cmd_reduce(red, args, out);
    if (p->parsed()) return cmd_profile(prof, args, out);
    if (a->parsed()) return cmd_attack(att, args, out);
    if (ra->parsed()) return cmd_rlwe_attack(ratt, args, out);
    if (e->parsed()) return cmd_estimate(est, out);
    if (x->parsed()) return cmd_estimate_rlwe(er, out);
  } catch (const InvalidArgument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace slwe::cli
