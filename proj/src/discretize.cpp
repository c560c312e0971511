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

#include "drawmpc/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "drawmpc/errors.hpp"
#include "drawmpc/matrix_io.hpp"

namespace drawmpc {
namespace {

constexpr double kEquilibriumTol = 1e-8;
constexpr int kRiccatiMaxIter = 10000;
constexpr double kRiccatiTol = 1e-10;

StateVector rk4_raw(const StateVector& x, const ControlInput& u, double dt, const ModelParams& p) {
  const bool contact = in_contact(x.head<3>(), p);
  auto f = [&](const StateVector& y) { return continuous_dynamics(State::from_vector(y), u, p, contact); };
  const StateVector k1 = f(x);
  const StateVector k2 = f(x + 0.5 * dt * k1);
  const StateVector k3 = f(x + 0.5 * dt * k2);
  const StateVector k4 = f(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double fd_step(double value) { return std::max(1e-6, 1e-6 * std::abs(value)); }

}  // namespace

StateVector rk4_step(const StateVector& x, const ControlInput& u, double dt, const ModelParams& p) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("rk4_step: dt must be positive");
  }
  StateVector next = rk4_raw(x, u, dt, p);
  const double qn = next.segment<4>(3).norm();
  if (!next.allFinite() || !(qn > 0.0)) {
    throw IntegrationFailure("rk4_step: non-finite state after integration");
  }
  next.segment<4>(3) /= qn;
  return next;
}

State rk4_step(const State& x, const ControlInput& u, double dt, const ModelParams& p) {
  return State::from_vector(rk4_step(x.to_vector(), u, dt, p));
}

Equilibrium hover_equilibrium(const ModelParams& p) {
  if (!(p.thrust_coeff > 0.0)) {
    throw InvalidArgument("hover_equilibrium: thrust_coeff must be positive");
  }
  // Hover sits on the board, so the magnet is engaged in either mode.
  const double per_motor = (p.mass * p.gravity + p.magnet_force) / (4.0 * p.thrust_coeff);
  return {State{}, ControlInput::Constant(per_motor)};
}

double equilibrium_residual(const State& x, const ControlInput& u, double dt, const ModelParams& p) {
  return (rk4_step(x.to_vector(), u, dt, p) - x.to_vector()).norm();
}

LinearModel linearize(const State& xbar, const ControlInput& ubar, double dt, const ModelParams& p) {
  const double residual = equilibrium_residual(xbar, ubar, dt, p);
  if (!(residual < kEquilibriumTol)) {
    std::ostringstream msg;
    msg << "linearize: equilibrium residual " << residual << " exceeds " << kEquilibriumTol;
    throw EquilibriumError(msg.str());
  }

  LinearModel lm;
  lm.xbar = xbar;
  lm.ubar = ubar;
  lm.dt = dt;

  const StateVector x0 = xbar.to_vector();
  for (int i = 0; i < kStateDim; ++i) {
    const double h = fd_step(x0(i));
    StateVector plus = x0, minus = x0;
    plus(i) += h;
    minus(i) -= h;
    lm.A.col(i) = (rk4_step(plus, ubar, dt, p) - rk4_step(minus, ubar, dt, p)) / (2.0 * h);
  }
  for (int j = 0; j < kInputDim; ++j) {
    const double h = fd_step(ubar(j));
    ControlInput plus = ubar, minus = ubar;
    plus(j) += h;
    minus(j) -= h;
    lm.B.col(j) = (rk4_step(x0, plus, dt, p) - rk4_step(x0, minus, dt, p)) / (2.0 * h);
  }
  return lm;
}

Eigen::MatrixXd dlqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                          const Eigen::MatrixXd& R) {
  const auto n = A.rows();
  const auto m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != m || R.cols() != m) {
    throw DimensionMismatch("dlqr_gain: inconsistent dimensions");
  }
  Eigen::MatrixXd P = Q;
  for (int it = 0; it < kRiccatiMaxIter; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd K = (R + BtP * B).ldlt().solve(BtP * A);
    Eigen::MatrixXd next = Q + A.transpose() * P * (A - B * K);
    next = 0.5 * (next + next.transpose());
    const double delta = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (!P.allFinite()) {
      break;
    }
    if (delta < kRiccatiTol) {
      const Eigen::MatrixXd BtPf = B.transpose() * P;
      return (R + BtPf * B).ldlt().solve(BtPf * A);
    }
  }
  throw NoConvergence("dlqr_gain: Riccati iteration did not converge");
}

double spectral_radius(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw DimensionMismatch("spectral_radius: matrix must be square");
  }
  if (M.size() == 0) {
    return 0.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("spectral_radius: eigenvalue computation failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void write_linear_model(std::ostream& out, const LinearModel& lm) {
  write_matrix_block(out, "A", lm.A);
  write_matrix_block(out, "B", lm.B);
  write_matrix_block(out, "XBAR", Eigen::MatrixXd(lm.xbar.to_vector().transpose()));
  write_matrix_block(out, "UBAR", Eigen::MatrixXd(lm.ubar.transpose()));
  write_matrix_block(out, "DT", Eigen::MatrixXd::Constant(1, 1, lm.dt));
}

LinearModel read_linear_model(std::istream& in) {
  const auto blocks = read_matrix_blocks(in);
  const auto get = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    const auto it = blocks.find(name);
    if (it == blocks.end()) {
      throw ParseError("linear model: missing block " + name);
    }
    if (it->second.rows() != rows || it->second.cols() != cols) {
      throw ParseError("linear model: block " + name + " has wrong shape");
    }
    return it->second;
  };
  LinearModel lm;
  lm.A = get("A", kStateDim, kStateDim);
  lm.B = get("B", kStateDim, kInputDim);
  lm.xbar = State::from_vector(get("XBAR", 1, kStateDim).transpose());
  lm.ubar = get("UBAR", 1, kInputDim).transpose();
  lm.dt = get("DT", 1, 1)(0, 0);
  return lm;
}

}  // namespace drawmpc
