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

#ifndef SLWE_MODMATH_HPP_
#define SLWE_MODMATH_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slwe {

using i128 = __int128;

/// Raised for violated preconditions on inputs (bad dimensions, out-of-range
/// parameters). Runtime failures use std::runtime_error.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest modulus supported by the 128-bit accumulation contract.
inline constexpr std::int64_t kMaxModulus = std::int64_t{1} << 41;

/// An LWE modulus q with 3 <= q <= 2^41.
class Modulus {
 public:
  explicit Modulus(std::int64_t q);

  std::int64_t value() const { return q_; }
  double as_double() const { return static_cast<double>(q_); }

  /// Representative of x in (-q/2, q/2]. For even q, q/2 maps to +q/2.
  std::int64_t center(std::int64_t x) const;
  std::int64_t center(i128 x) const;

  /// Standard deviation of the continuous uniform law on (-q/2, q/2]: q/sqrt(12).
  double uniform_stdev() const;

  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  std::int64_t q_;
};

/// Free-function form of Modulus::center.
std::int64_t center(std::int64_t x, std::int64_t q);

using IntVector = std::vector<std::int64_t>;

/// Dense row-major matrix of exact signed 64-bit integers.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> data);
  IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix column(const IntVector& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  std::int64_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<std::int64_t> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const std::int64_t> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  IntVector column_copy(std::size_t j) const;
  std::span<const std::int64_t> data() const { return data_; }
  std::span<std::int64_t> data() { return data_; }

  IntMatrix transpose() const;
  /// Rows [r0, r1) and columns [c0, c1).
  IntMatrix block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const;
  IntMatrix select_rows(std::span<const std::size_t> indices) const;
  IntMatrix select_columns(std::span<const std::size_t> indices) const;

  /// Every entry mapped into (-q/2, q/2].
  IntMatrix centered(const Modulus& q) const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> data_;
};

/// Exact product; throws std::overflow_error if an entry leaves int64 range.
IntMatrix mat_mul(const IntMatrix& x, const IntMatrix& y);

/// center(X * Y mod q) with 128-bit accumulation; never rounds.
IntMatrix mat_mul_mod(const IntMatrix& x, const IntMatrix& y, const Modulus& q);

IntVector mat_vec_mod(const IntMatrix& x, std::span<const std::int64_t> v, const Modulus& q);

/// Exact inner product with 128-bit accumulation.
i128 dot(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

/// Sample standard deviation (divisor rows-1) of the centered entries of each column.
std::vector<double> column_stdev(const IntMatrix& x, const Modulus& q);

/// Sample standard deviation of all centered entries of x.
double centered_stdev(std::span<const std::int64_t> values, const Modulus& q);

}  // namespace slwe

#endif  // SLWE_MODMATH_HPP_
