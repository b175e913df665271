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

#include "slwe/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "slwe/matrix_io.hpp"

namespace slwe {

void LweParams::validate() const {
  if (n == 0) throw InvalidArgument("n must be positive");
  (void)Modulus(q);
  if (h == 0 || h > n) throw InvalidArgument("Hamming weight must satisfy 0 < h <= n");
  if (!(sigma_e > 0.0)) throw InvalidArgument("sigma_e must be positive");
  if (samples() < n) throw InvalidArgument("m_total must be at least n");
  if (omega < 1) throw InvalidArgument("omega must be at least 1");
}

void to_json(nlohmann::json& j, const LweParams& p) {
  j = nlohmann::json{{"n", p.n},           {"q", p.q},
                     {"h", p.h},           {"sigma_e", p.sigma_e},
                     {"m_total", p.samples()}, {"omega", p.omega}};
}

void from_json(const nlohmann::json& j, LweParams& p) {
  j.at("n").get_to(p.n);
  j.at("q").get_to(p.q);
  j.at("h").get_to(p.h);
  p.sigma_e = j.value("sigma_e", 3.0);
  p.m_total = j.value("m_total", std::size_t{0});
  p.omega = j.value("omega", std::int64_t{10});
}

std::size_t Secret::weight() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

IntVector Secret::as_vector() const { return IntVector(bits.begin(), bits.end()); }

Secret Secret::from_vector(std::span<const std::int64_t> v) {
  Secret s;
  s.bits.reserve(v.size());
  for (std::int64_t x : v) {
    if (x != 0 && x != 1) throw InvalidArgument("secret entries must be 0 or 1");
    s.bits.push_back(static_cast<std::uint8_t>(x));
  }
  return s;
}

Secret gen_secret(std::size_t n, std::size_t h, Rng& rng, bool allow_zero) {
  if (h > n) throw InvalidArgument("gen_secret: h exceeds n");
  if (h == 0 && !allow_zero) throw InvalidArgument("gen_secret: h must be positive");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Secret s;
  s.bits.assign(n, 0);
  // Partial Fisher-Yates: the first h slots are a uniform h-subset.
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
    s.bits[idx[i]] = 1;
  }
  return s;
}

IntVector gen_error(std::size_t m, double sigma, Rng& rng) {
  IntVector e(m);
  for (auto& x : e) x = static_cast<std::int64_t>(std::llround(sigma * rng.normal()));
  return e;
}

namespace {

IntMatrix uniform_matrix(std::size_t rows, std::size_t cols, const Modulus& q, Rng& rng) {
  IntMatrix a(rows, cols);
  for (auto& x : a.data()) x = rng.centered_residue(q.value());
  return a;
}

IntVector noisy_products(const IntMatrix& A, const Secret& s, const IntVector& e,
                         const Modulus& q) {
  const IntVector sv = s.as_vector();
  IntVector b(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) b[i] = q.center(dot(A.row(i), sv) + e[i]);
  return b;
}

}  // namespace

LweInstance gen_lwe(const LweParams& params, const Secret& secret, Rng& rng) {
  params.validate();
  if (secret.size() != params.n) throw InvalidArgument("gen_lwe: secret length differs from n");
  const Modulus q = params.modulus();
  LweInstance inst;
  inst.params = params;
  inst.params.m_total = params.samples();
  inst.A = uniform_matrix(inst.params.m_total, params.n, q, rng);
  inst.error = gen_error(inst.params.m_total, params.sigma_e, rng);
  inst.b = noisy_products(inst.A, secret, *inst.error, q);
  inst.secret = secret;
  return inst;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

IntMatrix skew_circulant(std::span<const std::int64_t> a, const Modulus& q) {
  const std::size_t n = a.size();
  IntMatrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) = q.center(i >= j ? a[i - j] : -a[n + i - j]);
  return c;
}

RlweInstance gen_rlwe(const LweParams& params, const Secret& secret, Rng& rng,
                      std::size_t num_polys) {
  if (!is_power_of_two(params.n) || params.n < 2) {
    throw InvalidArgument("gen_rlwe: n must be a power of two (>= 2)");
  }
  if (num_polys == 0) num_polys = std::max<std::size_t>(1, params.samples() / params.n);
  LweParams p = params;
  p.m_total = num_polys * params.n;
  p.validate();
  if (secret.size() != p.n) throw InvalidArgument("gen_rlwe: secret length differs from n");
  const Modulus q = p.modulus();

  RlweInstance inst;
  inst.a_polys = uniform_matrix(num_polys, p.n, q, rng);
  inst.lwe.params = p;
  inst.lwe.A = IntMatrix(p.m_total, p.n);
  for (std::size_t k = 0; k < num_polys; ++k) {
    const IntMatrix block = skew_circulant(inst.a_polys.row(k), q);
    for (std::size_t i = 0; i < p.n; ++i) {
      auto src = block.row(i);
      std::copy(src.begin(), src.end(), inst.lwe.A.row(k * p.n + i).begin());
    }
  }
  inst.lwe.error = gen_error(p.m_total, p.sigma_e, rng);
  inst.lwe.b = noisy_products(inst.lwe.A, secret, *inst.lwe.error, q);
  inst.lwe.secret = secret;
  return inst;
}

double residual_stdev(const IntMatrix& A, std::span<const std::int64_t> b, const Secret& s,
                      const Modulus& q) {
  if (A.rows() != b.size() || A.cols() != s.size()) {
    throw InvalidArgument("residual_stdev: dimension mismatch");
  }
  const IntVector sv = s.as_vector();
  IntVector r(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) r[i] = q.center(dot(A.row(i), sv) - b[i]);
  return centered_stdev(r, q);
}

double verify_threshold(const Modulus& q) { return q.as_double() / (4.0 * std::sqrt(12.0)); }

bool verify_secret(const IntMatrix& A, std::span<const std::int64_t> b, const Secret& candidate,
                   const Modulus& q) {
  return residual_stdev(A, b, candidate, q) < verify_threshold(q);
}

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void save_common(const std::filesystem::path& dir, const LweInstance& inst, bool with_truth,
                 nlohmann::json meta) {
  std::filesystem::create_directories(dir);
  const std::int64_t q = inst.params.q;
  meta["params"] = inst.params;
  meta["seed"] = inst.seed;
  const bool truth = with_truth && inst.secret.has_value();
  meta["with_truth"] = truth;
  write_json(dir / "instance.json", meta);
  write_matrix(dir / "A.mat", inst.A, q);
  write_vector(dir / "b.mat", inst.b, q);
  if (truth) {
    write_vector(dir / "secret.mat", inst.secret->as_vector(), 0);
    if (inst.error) write_vector(dir / "e.mat", *inst.error, 0);
  }
}

LweInstance load_common(const std::filesystem::path& dir, const nlohmann::json& meta) {
  LweInstance inst;
  inst.params = meta.at("params").get<LweParams>();
  inst.params.validate();
  inst.seed = meta.value("seed", std::uint64_t{0});
  inst.A = read_matrix(dir / "A.mat").matrix;
  inst.b = read_vector(dir / "b.mat");
  if (inst.A.rows() != inst.b.size() || inst.A.cols() != inst.params.n) {
    throw std::runtime_error(dir.string() + ": A/b dimensions inconsistent with instance.json");
  }
  if (meta.value("with_truth", false)) {
    inst.secret = Secret::from_vector(read_vector(dir / "secret.mat"));
    if (std::filesystem::exists(dir / "e.mat")) inst.error = read_vector(dir / "e.mat");
  }
  return inst;
}

}  // namespace

void save_instance(const std::filesystem::path& dir, const LweInstance& inst, bool with_truth) {
  save_common(dir, inst, with_truth, {{"kind", "lwe"}});
}

void save_instance(const std::filesystem::path& dir, const RlweInstance& inst, bool with_truth) {
  save_common(dir, inst.lwe, with_truth, {{"kind", "rlwe"}, {"num_polys", inst.num_polys()}});
  write_matrix(dir / "a_poly.mat", inst.a_polys, inst.lwe.params.q);
  write_matrix(dir / "A_circ.mat", inst.A_circ(), inst.lwe.params.q);
}

bool is_rlwe_instance(const std::filesystem::path& dir) {
  return read_json(dir / "instance.json").value("kind", std::string("lwe")) == "rlwe";
}

LweInstance load_instance(const std::filesystem::path& dir) {
  return load_common(dir, read_json(dir / "instance.json"));
}

RlweInstance load_rlwe_instance(const std::filesystem::path& dir) {
  const nlohmann::json meta = read_json(dir / "instance.json");
  if (meta.value("kind", std::string("lwe")) != "rlwe") {
    throw std::runtime_error(dir.string() + " is not an RLWE instance");
  }
  RlweInstance inst;
  inst.lwe = load_common(dir, meta);
  inst.a_polys = read_matrix(dir / "a_poly.mat").matrix;
  if (!is_power_of_two(inst.lwe.params.n) ||
      inst.a_polys.rows() * inst.lwe.params.n != inst.lwe.A.rows()) {
    throw std::runtime_error(dir.string() + ": inconsistent RLWE files");
  }
  return inst;
}

}  // namespace slwe
