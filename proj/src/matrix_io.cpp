/*
 Copyright 2026 The drawmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "drawmpc/matrix_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "drawmpc/errors.hpp"

namespace drawmpc {

std::string format_number(double value, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
  return buf;
}

void write_matrix_block(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_number(m(i, j), 17);
    }
    out << '\n';
  }
}

std::map<std::string, Eigen::MatrixXd> read_matrix_blocks(std::istream& in) {
  std::map<std::string, Eigen::MatrixXd> blocks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream header(line);
    std::string name;
    long rows = -1, cols = -1;
    if (!(header >> name >> rows >> cols) || rows < 0 || cols < 0) {
      throw ParseError("matrix block: bad header", line_no);
    }
    Eigen::MatrixXd m(rows, cols);
    for (long i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) {
        throw ParseError("matrix block " + name + ": truncated", line_no);
      }
      ++line_no;
      std::istringstream row(line);
      for (long j = 0; j < cols; ++j) {
        if (!(row >> m(i, j))) {
          throw ParseError("matrix block " + name + ": bad value", line_no);
        }
      }
    }
    blocks[name] = std::move(m);
  }
  return blocks;
}

}  // namespace drawmpc
