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

#include "slwe/reduction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "slwe/matrix_io.hpp"

namespace slwe {

void ReductionConfig::validate() const {
  if (omega < 1) throw InvalidArgument("omega must be at least 1");
  if (tau && !(*tau > 0.0 && *tau <= 1.0)) throw InvalidArgument("tau must lie in (0, 1]");
  if (!(lll_delta > 0.25 && lll_delta < 1.0)) {
    throw InvalidArgument("lll_delta must lie in (0.25, 1)");
  }
  if (stall_window == 0) throw InvalidArgument("stall_window must be positive");
  if (!(stall_epsilon >= 0.0)) throw InvalidArgument("stall_epsilon must be non-negative");
  if (max_phase_runs == 0) throw InvalidArgument("max_phase_runs must be positive");
}

std::size_t ReductionConfig::rows_for(std::size_t n) const {
  if (subsample_m != 0) return subsample_m;
  return static_cast<std::size_t>(std::llround(0.875 * static_cast<double>(n)));
}

void to_json(nlohmann::json& j, const ReductionConfig& c) {
  j = nlohmann::json{{"omega", c.omega},
                     {"stall_window", c.stall_window},
                     {"stall_epsilon", c.stall_epsilon},
                     {"lll_delta", c.lll_delta},
                     {"subsample_m", c.subsample_m},
                     {"max_phase_runs", c.max_phase_runs}};
  j["tau"] = c.tau ? nlohmann::json(*c.tau) : nlohmann::json(nullptr);
  j["external_reducer"] =
      c.external_reducer ? nlohmann::json(*c.external_reducer) : nlohmann::json(nullptr);
  if (c.block_sizes) {
    j["block_sizes"] = {c.block_sizes->first, c.block_sizes->second};
  } else {
    j["block_sizes"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, ReductionConfig& c) {
  c = ReductionConfig{};
  c.omega = j.value("omega", c.omega);
  c.stall_window = j.value("stall_window", c.stall_window);
  c.stall_epsilon = j.value("stall_epsilon", c.stall_epsilon);
  c.lll_delta = j.value("lll_delta", c.lll_delta);
  c.subsample_m = j.value("subsample_m", c.subsample_m);
  c.max_phase_runs = j.value("max_phase_runs", c.max_phase_runs);
  if (j.contains("tau") && !j["tau"].is_null()) c.tau = j["tau"].get<double>();
  if (j.contains("external_reducer") && !j["external_reducer"].is_null()) {
    c.external_reducer = j["external_reducer"].get<std::string>();
  }
  if (j.contains("block_sizes") && !j["block_sizes"].is_null()) {
    c.block_sizes = std::make_pair(j["block_sizes"][0].get<int>(), j["block_sizes"][1].get<int>());
  }
}

Subsample subsample(const LweInstance& instance, std::size_t m, Rng& rng) {
  const std::size_t total = instance.A.rows();
  if (m > total) {
    throw InvalidArgument("subsample: requested " + std::to_string(m) + " rows but only " +
                          std::to_string(total) + " exist");
  }
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (m < total) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
  }
  Subsample out;
  out.A = instance.A.select_rows(idx);
  out.b.reserve(m);
  for (std::size_t i : idx) out.b.push_back(instance.b[i]);
  out.row_indices = std::move(idx);
  return out;
}

Embedding embed(const IntMatrix& A_sub, const Modulus& q, std::int64_t omega) {
  if (omega < 1) throw InvalidArgument("embed: omega must be at least 1");
  const std::size_t m = A_sub.rows();
  const std::size_t n = A_sub.cols();
  Embedding e{IntMatrix(m + n, m + n), omega, m, n, q.value()};
  for (std::size_t i = 0; i < n; ++i) e.basis(i, m + i) = q.value();
  for (std::size_t i = 0; i < m; ++i) {
    e.basis(n + i, i) = omega;
    for (std::size_t j = 0; j < n; ++j) e.basis(n + i, m + j) = q.center(A_sub(i, j));
  }
  return e;
}

double rho(const IntMatrix& A_red, const Modulus& q) {
  if (A_red.empty()) throw InvalidArgument("rho: empty matrix");
  double sumsq = 0.0;
  double sum = 0.0;
  for (std::int64_t x : A_red.data()) {
    const double v = static_cast<double>(q.center(x));
    sum += v;
    sumsq += v * v;
  }
  const double cnt = static_cast<double>(A_red.data().size());
  if (sumsq == 0.0) return 0.0;
  const double mean = sum / cnt;
  const double var = cnt > 1 ? (sumsq - cnt * mean * mean) / (cnt - 1.0) : sumsq;
  return std::sqrt(std::max(var, 0.0)) / q.uniform_stdev();
}

double basis_rho(const IntMatrix& basis, std::size_t m, std::size_t n, const Modulus& q) {
  std::vector<std::int64_t> entries;
  entries.reserve(basis.rows() * n);
  for (std::size_t i = 0; i < basis.rows(); ++i) {
    auto r = basis.row(i);
    const bool has_r = std::any_of(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(m),
                                   [](std::int64_t x) { return x != 0; });
    if (!has_r) continue;
    entries.insert(entries.end(), r.begin() + static_cast<std::ptrdiff_t>(m), r.end());
  }
  if (entries.empty()) throw std::runtime_error("basis_rho: no rows carry a transformation");
  const std::size_t rows = entries.size() / n;
  return rho(IntMatrix(rows, n, std::move(entries)), q);
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::filesystem::path make_scratch_dir() {
  static std::atomic<std::uint64_t> counter{0};
  std::random_device rd;
  const auto tag = std::to_string(rd()) + "_" + std::to_string(counter.fetch_add(1));
  auto dir = std::filesystem::temp_directory_path() / ("slwe_ext_" + tag);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

IntMatrix run_external_reducer(const std::string& command, const IntMatrix& basis,
                               std::optional<std::pair<int, int>> block_sizes) {
  const auto dir = make_scratch_dir();
  const auto in = dir / "in.mat";
  const auto out = dir / "out.mat";
  const auto err = dir / "stderr.txt";
  write_matrix(in, basis, 0);
  std::string cmd;
  if (block_sizes) {
    cmd += "SLWE_BETA1=" + std::to_string(block_sizes->first) +
           " SLWE_BETA2=" + std::to_string(block_sizes->second) + " ";
  }
  cmd += command + " " + shell_quote(in.string()) + " " + shell_quote(out.string()) + " 2> " +
         shell_quote(err.string());
  const int status = std::system(cmd.c_str());
  auto cleanup = [&] {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  };
  if (status != 0 || !std::filesystem::exists(out)) {
    std::string diag;
    if (std::ifstream es{err}) {
      std::ostringstream ss;
      ss << es.rdbuf();
      diag = ss.str();
    }
    cleanup();
    throw std::runtime_error("external reducer '" + command + "' failed (status " +
                             std::to_string(status) + "): " + diag);
  }
  MatrixFile result;
  try {
    result = read_matrix(out);
  } catch (...) {
    cleanup();
    throw;
  }
  cleanup();
  if (result.matrix.rows() != basis.rows() || result.matrix.cols() != basis.cols()) {
    throw std::runtime_error("external reducer returned a basis of the wrong shape");
  }
  return std::move(result.matrix);
}

std::vector<ReductionPhase> default_phases(const ReductionConfig& config) {
  std::vector<ReductionPhase> phases;
  const double delta = config.lll_delta;
  phases.push_back({"lll", [delta](const IntMatrix& b) { return lll_reduce(b, delta); }});
  if (config.external_reducer) {
    const std::string cmd = *config.external_reducer;
    const auto betas = config.block_sizes;
    phases.push_back(
        {"external", [cmd, betas](const IntMatrix& b) { return run_external_reducer(cmd, b, betas); }});
  } else {
    phases.push_back({"polish", [](const IntMatrix& b) { return b; }});
  }
  return phases;
}

ReductionOutcome interleaved_reduce(const Embedding& embedding, const ReductionConfig& config,
                                    std::span<const ReductionPhase> phases,
                                    const ProgressSink& sink) {
  config.validate();
  if (phases.empty()) throw InvalidArgument("interleaved_reduce: no phases");
  const Modulus q(embedding.q);
  ReductionOutcome out;
  out.basis = embedding.basis;
  auto emit = [&](ReductionEvent ev) {
    out.trace.push_back(ev);
    if (sink) sink(ev);
  };
  out.rho = basis_rho(out.basis, embedding.m, embedding.n, q);
  emit({"initial", 0, out.rho, false});
  if (config.tau && out.rho <= *config.tau) {
    out.stop_reason = "tau";
    return out;
  }

  std::vector<double> episode_gains;
  std::size_t phase = 0;
  while (true) {
    const ReductionPhase& current = phases[phase];
    std::vector<double> history{out.rho};
    bool stalled = false;
    while (!stalled) {
      out.basis = polish(current.run(out.basis));
      out.rho = basis_rho(out.basis, embedding.m, embedding.n, q);
      ++out.phase_runs;
      history.push_back(out.rho);
      const std::size_t runs = history.size() - 1;
      if (runs >= config.stall_window) {
        const double avg = (history[runs - config.stall_window] - history[runs]) /
                           static_cast<double>(config.stall_window);
        stalled = avg < config.stall_epsilon;
      }
      emit({current.name, runs, out.rho, stalled});
      if (config.tau && out.rho <= *config.tau) {
        out.stop_reason = "tau";
        return out;
      }
      if (out.phase_runs >= config.max_phase_runs) {
        out.stop_reason = "max_phase_runs";
        return out;
      }
    }
    episode_gains.push_back(history.front() - history.back());
    const std::size_t k = episode_gains.size();
    const bool single = phases.size() == 1;
    if ((single && episode_gains.back() < config.stall_epsilon) ||
        (!single && k >= 2 && episode_gains[k - 1] + episode_gains[k - 2] < config.stall_epsilon)) {
      out.stop_reason = "stalled";
      return out;
    }
    phase = (phase + 1) % phases.size();
  }
}

ReductionOutcome interleaved_reduce(const Embedding& embedding, const ReductionConfig& config,
                                    const ProgressSink& sink) {
  const auto phases = default_phases(config);
  return interleaved_reduce(embedding, config, phases, sink);
}

IntMatrix ReducedDataset::expanded_R() const {
  IntMatrix full(R.rows(), source_rows);
  for (std::size_t i = 0; i < R.rows(); ++i)
    for (std::size_t k = 0; k < row_indices.size(); ++k) full(i, row_indices[k]) = R(i, k);
  return full;
}

ReducedDataset extract(const IntMatrix& reduced, std::int64_t omega, std::size_t m, std::size_t n,
                       const IntMatrix& A_sub, std::span<const std::int64_t> b_sub,
                       const Modulus& q) {
  if (reduced.cols() != m + n || A_sub.rows() != m || A_sub.cols() != n || b_sub.size() != m) {
    throw InvalidArgument("extract: dimension mismatch");
  }
  std::vector<std::int64_t> r_rows;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < reduced.rows(); ++i) {
    auto row = reduced.row(i);
    bool nonzero = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (row[j] % omega != 0) {
        throw std::runtime_error("extract: transformation block not divisible by omega (row " +
                                 std::to_string(i) + ")");
      }
      nonzero = nonzero || row[j] != 0;
    }
    if (!nonzero) continue;
    for (std::size_t j = 0; j < m; ++j) r_rows.push_back(row[j] / omega);
    ++kept;
  }
  ReducedDataset ds;
  ds.R = IntMatrix(kept, m, std::move(r_rows));
  ds.A_red = mat_mul_mod(ds.R, A_sub, q);
  ds.b_red = mat_vec_mod(ds.R, b_sub, q);

  std::size_t k = 0;
  for (std::size_t i = 0; i < reduced.rows(); ++i) {
    auto row = reduced.row(i);
    if (std::all_of(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(m),
                    [](std::int64_t x) { return x == 0; })) {
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (q.center(row[m + j]) != ds.A_red(k, j)) {
        throw std::runtime_error("extract: reduced block disagrees with R*A mod q");
      }
    }
    ++k;
  }
  ds.rho = kept > 0 ? rho(ds.A_red, q) : 0.0;
  return ds;
}

ReducedDataset reduce_one(const LweInstance& instance, const ReductionConfig& config,
                          std::uint64_t seed, std::size_t index, const ProgressSink& sink) {
  const Modulus q = instance.params.modulus();
  Rng rng = Rng::derive(seed, index);
  const Subsample sub = subsample(instance, config.rows_for(instance.params.n), rng);
  const Embedding emb = embed(sub.A, q, config.omega);
  const ReductionOutcome outcome = interleaved_reduce(emb, config, sink);
  ReducedDataset ds = extract(outcome.basis, config.omega, emb.m, emb.n, sub.A, sub.b, q);
  ds.row_indices = sub.row_indices;
  ds.source_rows = instance.A.rows();
  ds.params = instance.params;
  ds.config = config;
  ds.seed = seed;
  ds.index = index;
  return ds;
}

std::vector<FactoryItem> dataset_factory(const LweInstance& instance,
                                         const ReductionConfig& config, std::size_t count,
                                         std::size_t parallelism, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("dataset_factory: count must be at least 1");
  config.validate();
  std::vector<FactoryItem> items(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      items[i].index = i;
      try {
        items[i].dataset = reduce_one(instance, config, seed, i);
      } catch (const std::exception& e) {
        items[i].error = e.what();
      }
    }
  };
  if (parallelism == 0) parallelism = std::max(1u, std::thread::hardware_concurrency());
  parallelism = std::min(parallelism, count);
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < parallelism; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return items;
}

SamplePool pool_samples(std::span<const ReducedDataset> datasets) {
  if (datasets.empty()) throw InvalidArgument("pool_samples: no datasets");
  const std::size_t n = datasets.front().A_red.cols();
  std::vector<std::int64_t> data;
  SamplePool pool;
  for (const auto& ds : datasets) {
    if (ds.A_red.cols() != n) throw InvalidArgument("pool_samples: datasets differ in n");
    data.insert(data.end(), ds.A_red.data().begin(), ds.A_red.data().end());
    pool.b.insert(pool.b.end(), ds.b_red.begin(), ds.b_red.end());
  }
  const std::size_t rows = pool.b.size();
  pool.A = IntMatrix(rows, n, std::move(data));
  return pool;
}

void save_dataset(const std::filesystem::path& dir, const ReducedDataset& ds) {
  std::filesystem::create_directories(dir);
  const std::int64_t q = ds.params.q;
  write_matrix(dir / "A.mat", ds.A_red, q);
  write_vector(dir / "b.mat", ds.b_red, q);
  write_matrix(dir / "R.mat", ds.R, 0);
  nlohmann::json meta{{"rho", ds.rho},          {"row_indices", ds.row_indices},
                      {"source_rows", ds.source_rows}, {"params", ds.params},
                      {"config", ds.config},    {"seed", ds.seed},
                      {"index", ds.index},      {"rows", ds.A_red.rows()}};
  std::ofstream out(dir / "meta.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << '\n';
}

ReducedDataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw std::runtime_error("cannot open " + (dir / "meta.json").string());
  const nlohmann::json meta = nlohmann::json::parse(in);
  ReducedDataset ds;
  ds.params = meta.at("params").get<LweParams>();
  ds.config = meta.at("config").get<ReductionConfig>();
  ds.rho = meta.at("rho").get<double>();
  ds.row_indices = meta.at("row_indices").get<std::vector<std::size_t>>();
  ds.source_rows = meta.at("source_rows").get<std::size_t>();
  ds.seed = meta.value("seed", std::uint64_t{0});
  ds.index = meta.value("index", std::size_t{0});
  ds.A_red = read_matrix(dir / "A.mat").matrix;
  ds.b_red = read_vector(dir / "b.mat");
  ds.R = read_matrix(dir / "R.mat").matrix;
  if (ds.A_red.rows() != ds.b_red.size() || ds.R.rows() != ds.A_red.rows() ||
      ds.R.cols() != ds.row_indices.size()) {
    throw std::runtime_error(dir.string() + ": inconsistent dataset files");
  }
  return ds;
}

std::vector<ReducedDataset> load_datasets(const std::filesystem::path& root) {
  std::ifstream in(root / "index.json");
  if (!in) throw std::runtime_error("cannot open " + (root / "index.json").string());
  const nlohmann::json index = nlohmann::json::parse(in);
  std::vector<ReducedDataset> out;
  for (const auto& name : index.at("datasets")) {
    out.push_back(load_dataset(root / name.get<std::string>()));
  }
  if (out.empty()) throw std::runtime_error(root.string() + ": index lists no datasets");
  return out;
}

void save_datasets(const std::filesystem::path& root, std::span<const ReducedDataset> datasets) {
  nlohmann::json names = nlohmann::json::array();
  nlohmann::json rhos = nlohmann::json::array();
  for (const auto& ds : datasets) {
    char name[32];
    std::snprintf(name, sizeof name, "matrix_%04zu", ds.index);
    save_dataset(root / name, ds);
    names.push_back(name);
    rhos.push_back(ds.rho);
  }
  std::ofstream out(root / "index.json");
  if (!out) throw std::runtime_error("cannot write " + (root / "index.json").string());
  out << nlohmann::json{{"datasets", names}, {"rho", rhos}}.dump(2) << '\n';
}

}  // namespace slwe
