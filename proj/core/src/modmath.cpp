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

#include "slwe/modmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace slwe {

Modulus::Modulus(std::int64_t q) : q_(q) {
  if (q < 3 || q > kMaxModulus) {
    throw InvalidArgument("modulus must satisfy 3 <= q <= 2^41, got " + std::to_string(q));
  }
}

std::int64_t Modulus::center(std::int64_t x) const { return slwe::center(x, q_); }

std::int64_t Modulus::center(i128 x) const {
  i128 r = x % q_;
  if (r < 0) r += q_;
  if (r > q_ / 2) r -= q_;
  return static_cast<std::int64_t>(r);
}

double Modulus::uniform_stdev() const { return as_double() / std::sqrt(12.0); }

std::int64_t center(std::int64_t x, std::int64_t q) {
  std::int64_t r = x % q;
  if (r < 0) r += q;
  if (r > q / 2) r -= q;
  return r;
}

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw InvalidArgument("IntMatrix: data size does not match rows*cols");
  }
}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidArgument("IntMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix id(n, n);
  for (std::size_t i = 0; i < n; ++i) id(i, i) = 1;
  return id;
}

IntMatrix IntMatrix::column(const IntVector& v) { return IntMatrix(v.size(), 1, v); }

IntVector IntMatrix::column_copy(std::size_t j) const {
  IntVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix IntMatrix::block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
  if (r0 > r1 || r1 > rows_ || c0 > c1 || c1 > cols_) {
    throw InvalidArgument("IntMatrix::block: range out of bounds");
  }
  IntMatrix out(r1 - r0, c1 - c0);
  for (std::size_t i = r0; i < r1; ++i)
    for (std::size_t j = c0; j < c1; ++j) out(i - r0, j - c0) = (*this)(i, j);
  return out;
}

IntMatrix IntMatrix::select_rows(std::span<const std::size_t> indices) const {
  IntMatrix out(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows_) throw InvalidArgument("IntMatrix::select_rows: index out of range");
    auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

IntMatrix IntMatrix::select_columns(std::span<const std::size_t> indices) const {
  IntMatrix out(rows_, indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= cols_) {
      throw InvalidArgument("IntMatrix::select_columns: index out of range");
    }
  }
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < indices.size(); ++k) out(i, k) = (*this)(i, indices[k]);
  return out;
}

IntMatrix IntMatrix::centered(const Modulus& q) const {
  IntMatrix out = *this;
  for (auto& x : out.data_) x = q.center(x);
  return out;
}

i128 dot(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
  i128 acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += static_cast<i128>(a[k]) * b[k];
  return acc;
}

namespace {

void check_product_dims(const IntMatrix& x, const IntMatrix& y) {
  if (x.cols() != y.rows()) {
    throw InvalidArgument("matrix product: dimension mismatch (" + std::to_string(x.rows()) + "x" +
                          std::to_string(x.cols()) + " times " + std::to_string(y.rows()) + "x" +
                          std::to_string(y.cols()) + ")");
  }
}

// Accumulates X*Y into a 128-bit buffer row by row; the callback stores one entry.
template <typename Store>
void product_rows(const IntMatrix& x, const IntMatrix& y, Store store) {
  std::vector<i128> acc(y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), i128{0});
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const std::int64_t xik = x(i, k);
      if (xik == 0) continue;
      auto yrow = y.row(k);
      for (std::size_t j = 0; j < y.cols(); ++j) acc[j] += static_cast<i128>(xik) * yrow[j];
    }
    for (std::size_t j = 0; j < y.cols(); ++j) store(i, j, acc[j]);
  }
}

}  // namespace

IntMatrix mat_mul(const IntMatrix& x, const IntMatrix& y) {
  check_product_dims(x, y);
  IntMatrix out(x.rows(), y.cols());
  product_rows(x, y, [&](std::size_t i, std::size_t j, i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min()) {
      throw std::overflow_error("mat_mul: entry exceeds 64-bit range");
    }
    out(i, j) = static_cast<std::int64_t>(v);
  });
  return out;
}

IntMatrix mat_mul_mod(const IntMatrix& x, const IntMatrix& y, const Modulus& q) {
  check_product_dims(x, y);
  IntMatrix out(x.rows(), y.cols());
  product_rows(x, y, [&](std::size_t i, std::size_t j, i128 v) { out(i, j) = q.center(v); });
  return out;
}

IntVector mat_vec_mod(const IntMatrix& x, std::span<const std::int64_t> v, const Modulus& q) {
  if (x.cols() != v.size()) throw InvalidArgument("mat_vec_mod: dimension mismatch");
  IntVector out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = q.center(dot(x.row(i), v));
  return out;
}

std::vector<double> column_stdev(const IntMatrix& x, const Modulus& q) {
  if (x.rows() < 2) throw InvalidArgument("column_stdev: need at least two rows");
  const std::size_t m = x.rows();
  std::vector<double> sum(x.cols(), 0.0);
  std::vector<double> sumsq(x.cols(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double v = static_cast<double>(q.center(r[j]));
      sum[j] += v;
      sumsq[j] += v * v;
    }
  }
  std::vector<double> out(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double mean = sum[j] / static_cast<double>(m);
    const double var = (sumsq[j] - static_cast<double>(m) * mean * mean) / static_cast<double>(m - 1);
    out[j] = std::sqrt(std::max(var, 0.0));
  }
  return out;
}

double centered_stdev(std::span<const std::int64_t> values, const Modulus& q) {
  if (values.size() < 2) throw InvalidArgument("centered_stdev: need at least two values");
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::int64_t x : values) {
    const double v = static_cast<double>(q.center(x));
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  return std::sqrt(std::max((sumsq - n * mean * mean) / (n - 1.0), 0.0));
}

}  // namespace slwe
