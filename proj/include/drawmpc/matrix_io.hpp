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

#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <Eigen/Dense>

namespace drawmpc {

// Plain-text matrix blocks:
//
//   NAME rows cols
//   row-major values, one matrix row per line
//
// Values are written with 17 significant digits so they reload bit-exactly.
void write_matrix_block(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m);
std::map<std::string, Eigen::MatrixXd> read_matrix_blocks(std::istream& in);

// %.*g formatting without locale surprises.
std::string format_number(double value, int significant_digits);

}  // namespace drawmpc
