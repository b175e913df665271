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

#ifndef SLWE_MATRIX_IO_HPP_
#define SLWE_MATRIX_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "slwe/modmath.hpp"

namespace slwe {

/// A matrix read from or written to the text matrix format.
///
/// Layout: a header line `rows cols q` followed by `rows` lines of `cols`
/// space-separated decimal integers. With q >= 3 entries are written centered
/// into (-q/2, q/2] and may be read as raw residues or centered values. A
/// header q of 0 marks an exact integer matrix (used for transformations),
/// which is never reduced. Vectors are stored as 1-column matrices.
struct MatrixFile {
  IntMatrix matrix;
  std::int64_t q = 0;
};

void write_matrix(std::ostream& out, const IntMatrix& m, std::int64_t q);
void write_matrix(const std::filesystem::path& path, const IntMatrix& m, std::int64_t q);
void write_vector(const std::filesystem::path& path, const IntVector& v, std::int64_t q);

MatrixFile read_matrix(std::istream& in);
MatrixFile read_matrix(const std::filesystem::path& path);
/// Reads a 1-column matrix file as a vector.
IntVector read_vector(const std::filesystem::path& path, std::int64_t* q_out = nullptr);

}  // namespace slwe

#endif  // SLWE_MATRIX_IO_HPP_
