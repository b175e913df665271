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

#include "slwe/matrix_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace slwe {

void write_matrix(std::ostream& out, const IntMatrix& m, std::int64_t q) {
  if (q != 0) (void)Modulus{q};
  out << m.rows() << ' ' << m.cols() << ' ' << q << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out << ' ';
      out << (q == 0 ? r[j] : center(r[j], q));
    }
    out << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const IntMatrix& m, std::int64_t q) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_matrix(out, m, q);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_vector(const std::filesystem::path& path, const IntVector& v, std::int64_t q) {
  write_matrix(path, IntMatrix::column(v), q);
}

MatrixFile read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("matrix file: missing header");
  std::istringstream hs(header);
  long long rows = -1;
  long long cols = -1;
  long long q = -1;
  if (!(hs >> rows >> cols >> q) || rows < 0 || cols < 0 || q < 0) {
    throw std::runtime_error("matrix file: malformed header '" + header + "'");
  }
  if (q != 0) (void)Modulus{q};
  std::vector<std::int64_t> data(static_cast<std::size_t>(rows * cols));
  for (auto& x : data) {
    long long v;
    if (!(in >> v)) throw std::runtime_error("matrix file: truncated body");
    x = q == 0 ? v : center(v, q);
  }
  return {IntMatrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(data)),
          q};
}

MatrixFile read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_matrix(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

IntVector read_vector(const std::filesystem::path& path, std::int64_t* q_out) {
  MatrixFile f = read_matrix(path);
  if (f.matrix.cols() != 1 && f.matrix.rows() != 0) {
    throw std::runtime_error(path.string() + ": expected a 1-column matrix");
  }
  if (q_out) *q_out = f.q;
  return f.matrix.column_copy(0);
}

}  // namespace slwe
