// Copyright 2026 The qcmsv Authors.
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

// Plain-text CSV for vectors and matrices: one matrix row per line,
// comma-separated decimals, no header. Vectors may be a single row or a
// single column. Values are written with 17 significant digits so a write /
// read cycle is exact.

#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcmsv/types.hpp"

namespace qcmsv::io {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::vector<double>> read_csv_rows(std::istream& in, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      require(first != std::string::npos, ErrorCode::Io,
              origin + ":" + std::to_string(line_no) + ": empty field");
      field = field.substr(first, last - first + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == field.size(), ErrorCode::Io,
              origin + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
      require(std::isfinite(v), ErrorCode::NonFinite,
              origin + ":" + std::to_string(line_no) + ": non-finite value");
      row.push_back(v);
    }
    if (!line.empty() && line.back() == ',') {
      throw Error(ErrorCode::Io, origin + ":" + std::to_string(line_no) + ": trailing comma");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix parse_matrix(std::istream& in, const std::string& origin = "<stream>") {
  const auto rows = read_csv_rows(in, origin);
  require(!rows.empty(), ErrorCode::Io, origin + ": no data");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == cols, ErrorCode::Io,
            origin + ": row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                " fields, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline Vector parse_vector(std::istream& in, const std::string& origin = "<stream>") {
  const Matrix m = parse_matrix(in, origin);
  require(m.rows() == 1 || m.cols() == 1, ErrorCode::Io,
          origin + ": a vector must be a single row or a single column");
  return m.rows() == 1 ? Vector(m.row(0).transpose()) : Vector(m.col(0));
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path + "' for reading");
  return in;
}

inline Matrix read_matrix(const std::string& path) {
  auto in = open_input(path);
  return parse_matrix(in, path);
}

inline Vector read_vector(const std::string& path) {
  auto in = open_input(path);
  return parse_vector(in, path);
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

/// Vectors are written as a single column.
inline void write_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

inline void write_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_matrix(out, m);
}

inline void write_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_vector(out, v);
}

}  // namespace qcmsv::io
