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
#include <string>

#include <Eigen/Dense>

#include "drawmpc/model.hpp"

namespace drawmpc {

using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kInputDim>;

struct Equilibrium {
  State state;
  ControlInput control;
};

// Discrete-time model x+ = A x + B u in delta coordinates about (xbar, ubar).
struct LinearModel {
  StateMatrix A;
  InputMatrix B;
  State xbar;
  ControlInput ubar;
  double dt = 0.0;

  StateVector to_delta(const State& x) const { return x.to_vector() - xbar.to_vector(); }
  State from_delta(const StateVector& dx) const { return State::from_vector(dx + xbar.to_vector()); }
  ControlInput to_delta(const ControlInput& u) const { return u - ubar; }
  ControlInput from_delta(const ControlInput& du) const { return du + ubar; }
};

// Classical RK4 step with zero-order-hold input and contact mode (taken at
// the start of the step); the quaternion is renormalized afterwards.
// Throws IntegrationFailure on non-finite results.
State rk4_step(const State& x, const ControlInput& u, double dt, const ModelParams& p);
StateVector rk4_step(const StateVector& x, const ControlInput& u, double dt, const ModelParams& p);

// Level hover at the origin with equal per-motor thrust balancing gravity
// and the magnet pull.
Equilibrium hover_equilibrium(const ModelParams& p);

// ||rk4_step(x, u, dt) - x||
double equilibrium_residual(const State& x, const ControlInput& u, double dt, const ModelParams& p);

// Central-difference Jacobians of rk4_step at (xbar, ubar). Throws
// EquilibriumError when the residual exceeds 1e-8.
LinearModel linearize(const State& xbar, const ControlInput& ubar, double dt, const ModelParams& p);

// Infinite-horizon discrete LQR gain by Riccati fixed-point iteration.
// Throws NoConvergence after 10,000 iterations.
Eigen::MatrixXd dlqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                          const Eigen::MatrixXd& R);

double spectral_radius(const Eigen::MatrixXd& M);

// Labeled row-major text blocks: A, B, XBAR, UBAR, DT.
void write_linear_model(std::ostream& out, const LinearModel& lm);
LinearModel read_linear_model(std::istream& in);

}  // namespace drawmpc
