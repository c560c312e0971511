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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "drawmpc/discretize.hpp"
#include "drawmpc/model.hpp"

namespace drawmpc {

// Weights follow the max-deviation rule: Q = diag(1/max_dev_x^2),
// R = diag(1/max_dev_u^2), Qf = terminal_factor * Q.
struct MpcConfig {
  int horizon = 75;
  StateVector max_dev_x = default_max_dev_x();
  Eigen::Vector4d max_dev_u = Eigen::Vector4d::Constant(0.5);
  double terminal_factor = 10.0;
  double u_min = 0.0;
  std::optional<double> u_max;  // unset: twice the hover command
  double solver_tol = 1e-6;
  int solver_max_iter = 5000;

  // 1 cm position, 0.5 m/s velocity, 1.0 quaternion, 5 rad/s body rate.
  static StateVector default_max_dev_x();

  StateVector state_weight() const;
  Eigen::Vector4d input_weight() const;
  StateVector terminal_weight() const;

  void validate() const;
};

// Absolute per-motor bounds [lo, hi] after resolving the u_max default.
struct ControlBounds {
  double lo;
  double hi;
};
ControlBounds control_bounds(const MpcConfig& cfg, const ControlInput& ubar);

// Finite-horizon tracking problem in delta coordinates:
//
//   min  sum_{k<N} |x_k - x_des_k|_Q^2 + |u_k|_R^2 + |x_N - x_des_N|_Qf^2
//   s.t. x_{k+1} = A x_k + B u_k,  x_0 = x_ic,  du_min <= u_k <= du_max
struct QpProblem {
  int horizon = 0;
  StateMatrix A = StateMatrix::Zero();
  InputMatrix B = InputMatrix::Zero();
  std::vector<StateVector> x_des;  // N + 1 entries
  StateVector x_ic = StateVector::Zero();
  StateVector q_diag = StateVector::Zero();
  Eigen::Vector4d r_diag = Eigen::Vector4d::Zero();
  StateVector qf_diag = StateVector::Zero();
  Eigen::Vector4d du_min = Eigen::Vector4d::Constant(-1.0);
  Eigen::Vector4d du_max = Eigen::Vector4d::Constant(1.0);

  void validate() const;
};

// Dense QP over stacked inputs U = (u_0, ..., u_{N-1}) with
// J(U) = U'HU + 2g'U + constant and box bounds lo <= U <= hi.
struct CondensedQp {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  double constant = 0.0;

  double objective(const Eigen::VectorXd& U) const;
};

CondensedQp condense(const QpProblem& problem);

// Predicted states x_0..x_N under the stacked input sequence.
std::vector<StateVector> rollout(const QpProblem& problem, const Eigen::VectorXd& U);

// Labeled text dump (H, g, LO, HI) for cross-checking with external solvers.
void write_qp(std::ostream& out, const CondensedQp& qp);

// ||x - clip(x - (Hx + g), lo, hi)||_inf
double kkt_residual(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                    const Eigen::VectorXd& hi, const Eigen::VectorXd& x);

struct BoxQpResult {
  Eigen::VectorXd x;
  double objective = 0.0;  // 0.5 x'Hx + g'x
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per accepted iterate
};

// Minimizes 0.5 x'Hx + g'x over lo <= x <= hi for positive definite H.
// Primal active-set iteration seeded from the unconstrained minimizer and an
// optional warm start; H is factorized once at construction.
class BoxQpSolver {
 public:
  explicit BoxQpSolver(Eigen::MatrixXd H);

  // Throws SolverError (carrying the best iterate) if the iteration cap is
  // reached before the KKT residual drops below tol.
  BoxQpResult solve(const Eigen::VectorXd& g, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double tol,
                    int max_iter, const Eigen::VectorXd* warm_start = nullptr) const;

  const Eigen::MatrixXd& hessian() const { return H_; }

 private:
  Eigen::MatrixXd H_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi, double tol, int max_iter,
                         const Eigen::VectorXd* warm_start = nullptr);

struct QpSolution {
  std::vector<ControlInput> du;  // N inputs
  std::vector<StateVector> dx;   // N + 1 states
  double objective = 0.0;        // J at the solution
  double residual = 0.0;
  int iterations = 0;
};

// Receding-horizon controller over a linear model. The condensed
// Hessian depends only on (A, B, weights), so it is built and factorized
// once; each step only forms the gradient. Consecutive steps warm-start
// from the previous solution shifted by one stage.
class MpcController {
 public:
  // With contact-gated params a second model, linearized about free hover
  // above the board, is used while the current state is off the board. The
  // measured mode is held over the whole horizon.
  MpcController(LinearModel lm, MpcConfig cfg, std::optional<ModelParams> params = std::nullopt);

  struct Step {
    ControlInput u;
    QpSolution solution;  // in the deltas of the model that produced it
  };

  // ref_window holds N + 1 desired states aligned with x_0..x_N.
  Step step(const State& x_now, std::span<const State> ref_window);

  QpProblem build_problem(const State& x_now, std::span<const State> ref_window) const;

  void reset_warm_start() { warm_.resize(0); }
  const Eigen::VectorXd& warm_start() const { return warm_; }

  const LinearModel& model() const { return modes_.front().lm; }
  const LinearModel& model_for(const State& x) const { return modes_[mode_index(x)].lm; }
  const MpcConfig& config() const { return cfg_; }
  const Eigen::MatrixXd& hessian() const { return modes_.front().solver.hessian(); }

 private:
  struct Mode {
    LinearModel lm;
    Eigen::MatrixXd gamma;  // 13N x 4N input-to-state map
    BoxQpSolver solver;
  };

  std::size_t mode_index(const State& x) const;

  MpcConfig cfg_;
  std::optional<ModelParams> params_;
  ControlBounds bounds_{};
  Eigen::VectorXd qbar_;  // stacked stage weights for x_1..x_N
  std::vector<Mode> modes_;
  Eigen::VectorXd warm_;
  std::size_t warm_mode_ = 0;
};

// Single stateless MPC step: returns the first optimal input in absolute
// coordinates, clipped to [u_min, u_max].
ControlInput mpc_step(const LinearModel& lm, const MpcConfig& cfg, const State& x_now,
                      std::span<const State> ref_window);

}  // namespace drawmpc
