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

#include "slwe/attack.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <set>
#include <thread>

#include "slwe/enumerate.hpp"

namespace slwe {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// x + y for x, y in (-q/2, q/2], mapped back into that range.
inline std::int64_t add_centered(std::int64_t x, std::int64_t y, std::int64_t q) {
  std::int64_t s = x + y;
  if (s > q / 2) {
    s -= q;
  } else if (s <= q / 2 - q) {
    s += q;
  }
  return s;
}

struct Entry {
  double score;
  std::uint64_t index;
  std::vector<std::size_t> positions;
};

bool entry_less(const Entry& a, const Entry& b) {
  return a.score < b.score || (a.score == b.score && a.index < b.index);
}

// The k entries with the lowest (score, index).
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  bool admits(double score, std::uint64_t index) const {
    if (heap_.size() < k_) return true;
    const Entry& worst = heap_.front();
    return score < worst.score || (score == worst.score && index < worst.index);
  }

  void offer(double score, std::uint64_t index, const std::vector<std::size_t>& positions) {
    if (!admits(score, index)) return;
    if (heap_.size() == k_) {
      std::pop_heap(heap_.begin(), heap_.end(), entry_less);
      heap_.pop_back();
    }
    heap_.push_back({score, index, positions});
    std::push_heap(heap_.begin(), heap_.end(), entry_less);
  }

  void merge(const TopK& other) {
    for (const Entry& e : other.heap_) offer(e.score, e.index, e.positions);
  }

  std::vector<Entry> sorted() const {
    std::vector<Entry> out = heap_;
    std::sort(out.begin(), out.end(), entry_less);
    return out;
  }

 private:
  std::size_t k_;
  std::vector<Entry> heap_;
};

}  // namespace

void SearchConfig::validate() const {
  if (top_k == 0) throw InvalidArgument("top_k must be at least 1");
  if (batch_size == 0) throw InvalidArgument("batch_size must be at least 1");
  if (eval_interval < batch_size) throw InvalidArgument("eval_interval must be >= batch_size");
  if (jobs == 0) throw InvalidArgument("jobs must be at least 1");
}

void to_json(nlohmann::json& j, const SearchConfig& c) {
  j = nlohmann::json{{"max_weight", c.max_weight},     {"top_k", c.top_k},
                     {"eval_interval", c.eval_interval}, {"batch_size", c.batch_size},
                     {"M_bruteforce", c.M_bruteforce}, {"M_greedy", c.M_greedy},
                     {"jobs", c.jobs}};
}

void from_json(const nlohmann::json& j, SearchConfig& c) {
  c = SearchConfig{};
  c.max_weight = j.value("max_weight", c.max_weight);
  c.top_k = j.value("top_k", c.top_k);
  c.eval_interval = j.value("eval_interval", c.eval_interval);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.M_bruteforce = j.value("M_bruteforce", c.M_bruteforce);
  c.M_greedy = j.value("M_greedy", c.M_greedy);
  c.jobs = j.value("jobs", c.jobs);
}

AttackData prepare_attack_data(std::span<const ReducedDataset> datasets, const ColumnProfile& prof,
                               const LweParams& params) {
  const SamplePool pool = pool_samples(datasets);
  if (prof.n() != pool.A.cols()) throw InvalidArgument("prepare_attack_data: profile width differs");
  AttackData d;
  d.A = pool.A;
  d.b = pool.b;
  d.cruel = prof.cruel_columns;
  d.cool = prof.cool_columns;
  d.q = params.q;
  d.h = params.h;
  d.sigma_r = prof.sigma_r_measured.value_or(0.0);
  long double norms = 0.0L;
  std::size_t rows = 0;
  for (const auto& ds : datasets) {
    for (std::int64_t x : ds.R.data()) norms += static_cast<long double>(x) * x;
    rows += ds.R.rows();
  }
  const double mean_norm = rows ? static_cast<double>(norms / rows) : 0.0;
  d.error_variance = params.sigma_e * params.sigma_e * mean_norm;
  return d;
}

std::vector<double> score_batch(std::span<const std::vector<std::uint8_t>> candidates,
                                const IntMatrix& A_cruel, std::span<const std::int64_t> b,
                                const Modulus& q) {
  if (A_cruel.rows() != b.size()) throw InvalidArgument("score_batch: row count mismatch");
  std::vector<std::size_t> all(A_cruel.cols());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  const CruelScorer scorer(A_cruel, b, all, A_cruel.rows(), q);
  std::vector<double> out;
  out.reserve(candidates.size());
  std::vector<std::size_t> pos;
  for (const auto& c : candidates) {
    if (c.size() != A_cruel.cols()) throw InvalidArgument("score_batch: candidate length");
    pos.clear();
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c[j]) pos.push_back(j);
    out.push_back(scorer.score(pos));
  }
  return out;
}

CruelScorer::CruelScorer(const IntMatrix& A, std::span<const std::int64_t> b,
                         std::span<const std::size_t> cruel, std::size_t M, const Modulus& q)
    : m_(std::min(M, A.rows())), q_(q.value()) {
  if (A.rows() != b.size()) throw InvalidArgument("CruelScorer: row count mismatch");
  cols_.resize(cruel.size());
  for (std::size_t c = 0; c < cruel.size(); ++c) {
    if (cruel[c] >= A.cols()) throw InvalidArgument("CruelScorer: column out of range");
    cols_[c].resize(m_);
    for (std::size_t i = 0; i < m_; ++i) cols_[c][i] = q.center(A(i, cruel[c]));
  }
  neg_b_.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) neg_b_[i] = q.center(-b[i]);
}

double CruelScorer::score(std::span<const std::size_t> positions) const {
  if (m_ == 0) return 0.0;
  IntVector r = neg_b_;
  for (std::size_t p : positions) {
    const IntVector& col = cols_.at(p);
    for (std::size_t i = 0; i < m_; ++i) r[i] = add_centered(r[i], col[i], q_);
  }
  return variance_statistic(r);
}

void CruelScorer::scan(std::size_t weight, std::uint64_t r0, std::uint64_t r1,
                       const Visitor& visit) const {
  const std::size_t n_u = cols_.size();
  r1 = std::min<std::uint64_t>(r1, binomial(n_u, weight));
  if (r0 >= r1) return;
  if (weight == 0) {
    visit({}, score({}));
    return;
  }
  std::vector<std::size_t> pos = colex_unrank(n_u, weight, r0);
  std::uint64_t rank = r0;
  IntVector base(m_);
  const double inv_m = m_ ? 1.0 / static_cast<double>(m_) : 0.0;
  while (true) {
    base = neg_b_;
    for (std::size_t j = 1; j < weight; ++j) {
      const IntVector& col = cols_[pos[j]];
      for (std::size_t i = 0; i < m_; ++i) base[i] = add_centered(base[i], col[i], q_);
    }
    const std::size_t upper = weight >= 2 ? pos[1] : n_u;
    for (std::size_t c = pos[0]; c < upper && rank < r1; ++c, ++rank) {
      pos[0] = c;
      const IntVector& col = cols_[c];
      double acc = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const auto x = static_cast<double>(add_centered(base[i], col[i], q_));
        acc += x * x;
      }
      visit(pos, acc * inv_m);
    }
    if (rank >= r1) return;
    pos[0] = upper - 1;
    if (!colex_next(pos, n_u)) return;
  }
}

Secret greedy_cool(const Secret& s_star, const IntMatrix& A, std::span<const std::int64_t> b,
                   std::span<const std::size_t> order, std::size_t M_greedy, const Modulus& q) {
  if (A.cols() != s_star.size() || A.rows() != b.size()) {
    throw InvalidArgument("greedy_cool: dimension mismatch");
  }
  const std::size_t m = M_greedy == 0 ? A.rows() : std::min(M_greedy, A.rows());
  Secret s = s_star;
  const IntVector sv = s.as_vector();
  IntVector r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = q.center(dot(A.row(i), sv) - b[i]);
  const std::int64_t qv = q.value();
  IntVector r0(m);
  IntVector r1(m);
  for (std::size_t idx : order) {
    if (idx >= s.size()) throw InvalidArgument("greedy_cool: index out of range");
    const bool was_one = s.bits[idx] != 0;
    double acc0 = 0.0;
    double acc1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::int64_t a = q.center(A(i, idx));
      r0[i] = was_one ? add_centered(r[i], -a, qv) : r[i];
      r1[i] = add_centered(r0[i], a, qv);
      acc0 += static_cast<double>(r0[i]) * static_cast<double>(r0[i]);
      acc1 += static_cast<double>(r1[i]) * static_cast<double>(r1[i]);
    }
    if (acc0 <= acc1) {
      s.bits[idx] = 0;
      r.swap(r0);
    } else {
      s.bits[idx] = 1;
      r.swap(r1);
    }
  }
  return s;
}

Secret greedy_cool(const Secret& s_star, const AttackData& data, std::size_t M_greedy) {
  return greedy_cool(s_star, data.A, data.b, data.cool, M_greedy, Modulus(data.q));
}

std::size_t bruteforce_samples(const AttackData& data, const SearchConfig& config,
                               const TestConfig& test) {
  const std::size_t pool = data.A.rows();
  if (config.M_bruteforce != 0) return std::min(config.M_bruteforce, pool);
  const double v = static_cast<double>(data.h) * data.sigma_r * data.sigma_r + data.error_variance;
  try {
    const std::uint64_t m = min_samples(test.alpha, test.beta, v, Modulus(data.q));
    return static_cast<std::size_t>(std::min<std::uint64_t>(std::max<std::uint64_t>(m, 30), pool));
  } catch (const Indistinguishable&) {
    return pool;
  }
}

namespace {

class WindowSearch {
 public:
  WindowSearch(const AttackData& data, const SearchConfig& config, std::size_t m_bf)
      : data_(data),
        config_(config),
        q_(data.q),
        scorer_(data.A, data.b, data.cruel, m_bf, q_),
        top_(config.top_k) {}

  std::size_t n_u() const { return data_.cruel.size(); }

  // Scores weight class `w`, evaluating every eval_interval candidates and at
  // the end of the class. Returns the successful candidate, if any.
  std::optional<std::pair<Secret, std::size_t>> run_weight(std::size_t w, const IntMatrix& A_orig,
                                                           std::span<const std::int64_t> b_orig,
                                                           AttackReport& report) {
    const std::uint64_t count = binomial(n_u(), w);
    const std::uint64_t offset = w == 0 ? 0 : binomial_sum(n_u(), w - 1);
    std::uint64_t rank = 0;
    while (rank < count) {
      const std::uint64_t room = config_.eval_interval - since_eval_;
      const std::uint64_t end = std::min(count, rank + room);
      auto t0 = Clock::now();
      scan_segment(w, offset, rank, end);
      report.stage_timings["enumerate"] += seconds_since(t0);
      report.candidates_scored += end - rank;
      since_eval_ += end - rank;
      rank = end;
      if (since_eval_ >= config_.eval_interval || rank == count) {
        since_eval_ = 0;
        if (auto hit = evaluate(A_orig, b_orig, report)) return hit;
      }
    }
    return std::nullopt;
  }

 private:
  void scan_segment(std::size_t w, std::uint64_t offset, std::uint64_t r0, std::uint64_t r1) {
    const std::uint64_t chunk = config_.batch_size;
    const std::uint64_t chunks = (r1 - r0 + chunk - 1) / chunk;
    const std::size_t jobs = static_cast<std::size_t>(
        std::min<std::uint64_t>(config_.jobs, std::max<std::uint64_t>(chunks, 1)));
    std::atomic<std::uint64_t> next{0};
    std::vector<TopK> local(jobs, TopK(config_.top_k));
    auto worker = [&](std::size_t id) {
      TopK& mine = local[id];
      for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
        const std::uint64_t a = r0 + c * chunk;
        const std::uint64_t b = std::min(r1, a + chunk);
        std::uint64_t idx = offset + a;
        scorer_.scan(w, a, b, [&](const std::vector<std::size_t>& pos, double s) {
          if (mine.admits(s, idx)) mine.offer(s, idx, pos);
          ++idx;
        });
      }
    };
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(worker, t);
    worker(0);
    for (auto& t : threads) t.join();
    for (const auto& l : local) top_.merge(l);
  }

  std::optional<std::pair<Secret, std::size_t>> evaluate(const IntMatrix& A_orig,
                                                         std::span<const std::int64_t> b_orig,
                                                         AttackReport& report) {
    ++report.evaluations;
    for (const Entry& e : top_.sorted()) {
      if (!evaluated_.insert(e.index).second) continue;
      Secret s;
      s.bits.assign(data_.n(), 0);
      for (std::size_t p : e.positions) s.bits[data_.cruel[p]] = 1;
      auto t0 = Clock::now();
      Secret full = greedy_cool(s, data_, config_.M_greedy);
      report.stage_timings["greedy"] += seconds_since(t0);
      ++report.greedy_runs;
      t0 = Clock::now();
      const bool ok = verify_secret(A_orig, b_orig, full, q_);
      report.stage_timings["verify"] += seconds_since(t0);
      if (ok) return std::make_pair(std::move(full), e.positions.size());
    }
    return std::nullopt;
  }

  const AttackData& data_;
  const SearchConfig& config_;
  Modulus q_;
  CruelScorer scorer_;
  TopK top_;
  std::set<std::uint64_t> evaluated_;
  std::uint64_t since_eval_ = 0;
};

}  // namespace

AttackReport run_windows(std::span<const AttackData> windows, std::span<const std::size_t> labels,
                         const IntMatrix& A_orig, std::span<const std::int64_t> b_orig,
                         const SearchConfig& config, const TestConfig& test) {
  config.validate();
  test.validate();
  if (windows.empty() || windows.size() != labels.size()) {
    throw InvalidArgument("run_windows: need one label per window");
  }
  const auto t0 = Clock::now();
  AttackReport report;
  report.stage_timings = {{"enumerate", 0.0}, {"greedy", 0.0}, {"verify", 0.0}};
  const std::size_t m_bf = bruteforce_samples(windows.front(), config, test);
  report.M_bruteforce = m_bf;
  const std::size_t pool = windows.front().A.rows();
  report.M_greedy = config.M_greedy == 0 ? pool : std::min(config.M_greedy, pool);
  report.iota = m_bf > 0 ? iota(test.alpha, m_bf, Modulus(windows.front().q)) : 0.0;

  std::vector<WindowSearch> searches;
  searches.reserve(windows.size());
  std::size_t max_w = config.max_weight;
  for (const auto& w : windows) {
    searches.emplace_back(w, config, m_bf);
    max_w = std::min(max_w, w.cruel.size());
  }
  for (std::size_t w = 0; w <= max_w; ++w) {
    for (std::size_t i = 0; i < searches.size(); ++i) {
      if (auto hit = searches[i].run_weight(w, A_orig, b_orig, report)) {
        report.recovered = std::move(hit->first);
        report.h_u_found = hit->second;
        report.window = labels[i];
        report.elapsed = seconds_since(t0);
        return report;
      }
    }
  }
  report.elapsed = seconds_since(t0);
  return report;
}

AttackReport run_attack(const AttackData& data, const IntMatrix& A_orig,
                        std::span<const std::int64_t> b_orig, const SearchConfig& config,
                        const TestConfig& test) {
  const std::size_t label = 0;
  AttackReport r = run_windows(std::span<const AttackData>(&data, 1),
                               std::span<const std::size_t>(&label, 1), A_orig, b_orig, config,
                               test);
  r.window.reset();
  return r;
}

void to_json(nlohmann::json& j, const AttackReport& r) {
  j = nlohmann::json{{"recovered", r.recovered.has_value()},
                     {"candidates_scored", r.candidates_scored},
                     {"evaluations", r.evaluations},
                     {"greedy_runs", r.greedy_runs},
                     {"M_bruteforce", r.M_bruteforce},
                     {"M_greedy", r.M_greedy},
                     {"iota", r.iota}};
  j["secret"] = r.recovered ? nlohmann::json(r.recovered->as_vector()) : nlohmann::json(nullptr);
  j["h_u_found"] = r.h_u_found ? nlohmann::json(*r.h_u_found) : nlohmann::json(nullptr);
  j["window"] = r.window ? nlohmann::json(*r.window) : nlohmann::json(nullptr);
  nlohmann::json t = r.stage_timings;
  t["elapsed"] = r.elapsed;
  j["timings"] = t;
}

}  // namespace slwe
