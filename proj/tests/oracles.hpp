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

// Brute-force reference implementations used only by the tests.

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace drawmpc::testing {

// Minimizes 0.5 x'Hx + g'x over lo <= x <= hi by trying every assignment of
// each coordinate to {lower, free, upper} and keeping the best feasible KKT
// point. 3^n systems, so n <= 8 or so.
struct EnumResult {
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::infinity();
};

inline EnumResult enumerate_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(g.size());
  int patterns = 1;
  for (int i = 0; i < n; ++i) patterns *= 3;
  EnumResult best;
  std::vector<int> state(n);
  for (int code = 0; code < patterns; ++code) {
    int c = code;
    for (int i = 0; i < n; ++i) {
      state[i] = c % 3;
      c /= 3;
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<int> free;
    for (int i = 0; i < n; ++i) {
      if (state[i] == 0) x(i) = lo(i);
      if (state[i] == 2) x(i) = hi(i);
      if (state[i] == 1) free.push_back(i);
    }
    if (!free.empty()) {
      const int m = static_cast<int>(free.size());
      Eigen::MatrixXd Hff(m, m);
      Eigen::VectorXd rhs(m);
      for (int a = 0; a < m; ++a) {
        rhs(a) = -g(free[a]);
        for (int i = 0; i < n; ++i) {
          if (state[i] != 1) rhs(a) -= H(free[a], i) * x(i);
        }
        for (int b = 0; b < m; ++b) Hff(a, b) = H(free[a], free[b]);
      }
      const Eigen::VectorXd xf = Hff.ldlt().solve(rhs);
      for (int a = 0; a < m; ++a) x(free[a]) = xf(a);
    }
    bool feasible = true;
    for (int i = 0; i < n; ++i) {
      if (x(i) < lo(i) - 1e-12 || x(i) > hi(i) + 1e-12) feasible = false;
    }
    if (!feasible) continue;
    const double f = 0.5 * x.dot(H * x) + g.dot(x);
    if (f < best.objective) {
      best.objective = f;
      best.x = x;
    }
  }
  return best;
}

// Shortest open path over all permutations.
inline double brute_force_open_path(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<int> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double len = 0.0;
    for (std::size_t i = 1; i < perm.size(); ++i) len += (pts[perm[i]] - pts[perm[i - 1]]).norm();
    best = std::min(best, len);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Eigen::MatrixXd random_psd(std::mt19937& rng, int n, double ridge) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) = nd(rng);
  }
  return M * M.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

}  // namespace drawmpc::testing
