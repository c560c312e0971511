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
#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "drawmpc/errors.hpp"
#include "drawmpc/matrix_io.hpp"
#include "drawmpc/qp.hpp"
#include "drawmpc/trajgen.hpp"
#include "oracles.hpp"

using namespace drawmpc;

namespace {

LinearModel hover_model() {
  const ModelParams p;
  const Equilibrium eq = hover_equilibrium(p);
  return linearize(eq.state, eq.control, 0.01, p);
}

QpProblem random_problem(std::mt19937& rng, int N) {
  std::uniform_real_distribution<double> ud(0.5, 2.0);
  QpProblem p;
  p.horizon = N;
  p.A = StateMatrix::Identity() + 0.05 * StateMatrix(testing::random_vector(rng, kStateDim * kStateDim).reshaped(kStateDim, kStateDim));
  p.B = InputMatrix(testing::random_vector(rng, kStateDim * kInputDim, 0.1).reshaped(kStateDim, kInputDim));
  p.x_ic = testing::random_vector(rng, kStateDim);
  for (int k = 0; k <= N; ++k) p.x_des.push_back(testing::random_vector(rng, kStateDim));
  for (int i = 0; i < kStateDim; ++i) {
    p.q_diag(i) = ud(rng);
    p.qf_diag(i) = 10 * ud(rng);
  }
  for (int i = 0; i < kInputDim; ++i) p.r_diag(i) = ud(rng);
  p.du_min = ControlInput::Constant(-0.3);
  p.du_max = ControlInput::Constant(0.4);
  return p;
}

// Objective evaluated on the uncondensed sum.
double sparse_objective(const QpProblem& p, const Eigen::VectorXd& U) {
  StateVector x = p.x_ic;
  double J = 0.0;
  for (int k = 0; k < p.horizon; ++k) {
    const ControlInput u = U.segment<kInputDim>(kInputDim * k);
    const StateVector e = x - p.x_des[k];
    J += e.dot(p.q_diag.cwiseProduct(e)) + u.dot(p.r_diag.cwiseProduct(u));
    x = p.A * x + p.B * u;
  }
  const StateVector e = x - p.x_des[p.horizon];
  return J + e.dot(p.qf_diag.cwiseProduct(e));
}

}  // namespace

TEST_CASE("condense with one stage matches the hand expansion") {
  std::mt19937 rng(31);
  const QpProblem p = random_problem(rng, 1);
  const CondensedQp qp = condense(p);
  const Eigen::Matrix4d H = p.B.transpose() * p.qf_diag.asDiagonal() * p.B + Eigen::Matrix4d(p.r_diag.asDiagonal());
  const Eigen::Vector4d g = p.B.transpose() * p.qf_diag.asDiagonal() * (p.A * p.x_ic - p.x_des[1]);
  CHECK((qp.H - H).cwiseAbs().maxCoeff() < 1e-12 * H.cwiseAbs().maxCoeff());
  CHECK((qp.g - g).cwiseAbs().maxCoeff() < 1e-12 * g.cwiseAbs().maxCoeff());
  CHECK(qp.H == qp.H.transpose());
}

TEST_CASE("condensed objective equals the sparse sum") {
  std::mt19937 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const QpProblem p = random_problem(rng, 2 + trial % 5);
    const CondensedQp qp = condense(p);
    const Eigen::VectorXd U = testing::random_vector(rng, kInputDim * p.horizon, 0.2);
    const double ref = sparse_objective(p, U);
    CHECK(std::abs(qp.objective(U) - ref) < 1e-10 * std::max(1.0, std::abs(ref)));

    const auto xs = rollout(p, U);
    REQUIRE(xs.size() == static_cast<std::size_t>(p.horizon + 1));
    for (int k = 0; k < p.horizon; ++k) {
      CHECK((xs[k + 1] - (p.A * xs[k] + p.B * U.segment<kInputDim>(kInputDim * k))).norm() == 0.0);
    }
  }
}

TEST_CASE("already at target gives zero input") {
  const LinearModel lm = hover_model();
  const MpcConfig cfg;
  QpProblem p;
  p.horizon = 5;
  p.A = lm.A;
  p.B = lm.B;
  p.x_des.assign(6, StateVector::Zero());
  p.q_diag = cfg.state_weight();
  p.r_diag = cfg.input_weight();
  p.qf_diag = cfg.terminal_weight();
  const CondensedQp qp = condense(p);
  const BoxQpResult r = solve_box_qp(qp.H, qp.g, qp.lo, qp.hi, 1e-9, 100);
  CHECK(r.x.norm() == 0.0);
  CHECK(qp.objective(r.x) == 0.0);
}

TEST_CASE("QpProblem validation") {
  std::mt19937 rng(33);
  QpProblem p = random_problem(rng, 3);
  p.x_des.pop_back();
  CHECK_THROWS_AS(condense(p), DimensionMismatch);
  p = random_problem(rng, 3);
  p.r_diag(2) = 0.0;
  CHECK_THROWS_AS(condense(p), InvalidArgument);
  p = random_problem(rng, 3);
  p.du_min(0) = 1.0;
  CHECK_THROWS_AS(condense(p), InvalidArgument);
}

TEST_CASE("box QP simple cases") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd c = Eigen::Vector3d(0.5, -2.0, 3.0);
  const Eigen::VectorXd wide = Eigen::VectorXd::Constant(3, 100.0);
  CHECK((solve_box_qp(I, -c, -wide, wide, 1e-10, 50).x - c).norm() < 1e-12);

  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  const BoxQpResult r = solve_box_qp(one, Eigen::VectorXd::Constant(1, -2.0), Eigen::VectorXd::Constant(1, -1.0),
                                     Eigen::VectorXd::Constant(1, 1.0), 1e-10, 50);
  CHECK(r.x(0) == 1.0);
  CHECK(r.residual == 0.0);
}

TEST_CASE("box QP matches the unconstrained minimizer with loose bounds") {
  std::mt19937 rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 * (1 + trial % 3);
    const Eigen::MatrixXd H = testing::random_psd(rng, n, 0.5);
    const Eigen::VectorXd g = testing::random_vector(rng, n);
    const Eigen::VectorXd x_star = -H.ldlt().solve(g);
    const Eigen::VectorXd wide = Eigen::VectorXd::Constant(n, 10.0 + x_star.cwiseAbs().maxCoeff());
    const BoxQpResult r = solve_box_qp(H, g, -wide, wide, 1e-10, 100);
    CHECK((r.x - x_star).norm() < 1e-8 * std::max(1.0, x_star.norm()));
  }
}

TEST_CASE("box QP agrees with active-set enumeration") {
  std::mt19937 rng(35);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = dim(rng);
    const Eigen::MatrixXd H = testing::random_psd(rng, n, 0.1);
    const Eigen::VectorXd g = testing::random_vector(rng, n, 3.0);
    const Eigen::VectorXd lo = -testing::random_vector(rng, n).cwiseAbs();
    const Eigen::VectorXd hi = testing::random_vector(rng, n).cwiseAbs();
    const auto oracle = testing::enumerate_box_qp(H, g, lo, hi);
    const BoxQpResult r = solve_box_qp(H, g, lo, hi, 1e-9, 500);
    CHECK(std::abs(r.objective - oracle.objective) < 1e-6);
    CHECK((r.x - oracle.x).norm() < 1e-5);
    CHECK(kkt_residual(H, g, lo, hi, r.x) <= 1e-9);
    CHECK((r.x.array() >= lo.array()).all());
    CHECK((r.x.array() <= hi.array()).all());
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
      CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-12 * std::abs(r.objective_trace[i - 1]));
    }
  }
}

TEST_CASE("kkt residual definition") {
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd g = Eigen::Vector2d(-3.0, 0.0);
  const Eigen::VectorXd lo = Eigen::Vector2d(-1.0, -1.0), hi = Eigen::Vector2d(1.0, 1.0);
  // At x = 0: clip(0 - (0 + g)) = (1, 0) so the residual is 1.
  CHECK(kkt_residual(H, g, lo, hi, Eigen::Vector2d::Zero()) == 1.0);
  CHECK(kkt_residual(H, g, lo, hi, Eigen::Vector2d(1.0, 0.0)) == 0.0);
}

TEST_CASE("solver failure carries the best iterate") {
  std::mt19937 rng(36);
  const int n = 8;
  const Eigen::MatrixXd H = testing::random_psd(rng, n, 0.01);
  const Eigen::VectorXd g = testing::random_vector(rng, n, 10.0);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -0.1), hi = Eigen::VectorXd::Constant(n, 0.1);
  bool threw = false;
  try {
    solve_box_qp(H, g, lo, hi, 1e-12, 1);
  } catch (const SolverError& e) {
    threw = true;
    CHECK(e.best_iterate().size() == n);
    CHECK(e.residual() > 1e-12);
  }
  CHECK(threw);
}

TEST_CASE("QP dump round trips through the matrix reader") {
  std::mt19937 rng(37);
  const CondensedQp qp = condense(random_problem(rng, 2));
  std::stringstream ss;
  write_qp(ss, qp);
  const auto blocks = read_matrix_blocks(ss);
  CHECK(blocks.at("H") == qp.H);
  CHECK(Eigen::VectorXd(blocks.at("g")) == qp.g);
  CHECK(Eigen::VectorXd(blocks.at("LO")) == qp.lo);
  CHECK(Eigen::VectorXd(blocks.at("HI")) == qp.hi);
}

TEST_CASE("MpcConfig weights and validation") {
  MpcConfig cfg;
  CHECK(cfg.state_weight()(0) == doctest::Approx(1e4));
  CHECK(cfg.state_weight()(7) == doctest::Approx(4.0));
  CHECK(cfg.input_weight()(0) == doctest::Approx(4.0));
  CHECK(cfg.terminal_weight() == 10.0 * cfg.state_weight());
  const ControlBounds b = control_bounds(cfg, ControlInput::Constant(3.0));
  CHECK(b.lo == 0.0);
  CHECK(b.hi == 6.0);

  cfg.horizon = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = MpcConfig{};
  cfg.terminal_factor = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = MpcConfig{};
  cfg.u_max = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("mpc_step at hover returns hover") {
  const LinearModel lm = hover_model();
  MpcConfig cfg;
  cfg.horizon = 20;
  const std::vector<State> window(21, lm.xbar);
  const ControlInput u = mpc_step(lm, cfg, lm.xbar, window);
  CHECK((u - lm.ubar).cwiseAbs().maxCoeff() < cfg.solver_tol);
}

TEST_CASE("mpc_step pushes a displaced vehicle back") {
  const ModelParams p;
  const LinearModel lm = hover_model();
  MpcConfig cfg;
  cfg.horizon = 20;
  const std::vector<State> window(21, lm.xbar);
  State x = lm.xbar;
  x.r.x() = 0.01;
  const ControlInput u = mpc_step(lm, cfg, x, window);
  // Negative x acceleration needs a negative rotation about body y.
  CHECK(body_torques(u, p).y() < 0.0);
  const State next = rk4_step(x, u, 0.01, p);
  CHECK(next.w.y() < 0.0);

  MpcController ctrl(lm, cfg);
  for (int k = 0; k < 100; ++k) x = rk4_step(x, ctrl.step(x, window).u, 0.01, p);
  CHECK(std::abs(x.r.x()) < 0.005);
}

TEST_CASE("figure-8 start is close to hover") {
  const LinearModel lm = hover_model();
  MpcConfig cfg;
  const WaypointPath path = velocity_profile_curvature(figure8(1000, 0.1, Eigen::Vector3d::Zero()));
  const ReferenceTrajectory ref = lift_to_reference(path, cfg.horizon);
  const std::vector<State> window(ref.states.begin(), ref.states.begin() + cfg.horizon + 1);
  const ControlInput u = mpc_step(lm, cfg, ref.states.front(), window);
  CHECK((u - lm.ubar).cwiseAbs().maxCoeff() < 0.05 * lm.ubar(0));
}

TEST_CASE("warm start never starts worse than cold") {
  const ModelParams p;
  const LinearModel lm = hover_model();
  MpcConfig cfg;
  cfg.horizon = 20;
  const WaypointPath path = velocity_profile_curvature(figure8(300, 0.1, Eigen::Vector3d::Zero()));
  const ReferenceTrajectory ref = lift_to_reference(path, cfg.horizon);
  MpcController ctrl(lm, cfg);
  State x = ref.states.front();
  for (int k = 0; k < 60; ++k) {
    const std::span<const State> window(ref.states.data() + k, cfg.horizon + 1);
    const CondensedQp qp = condense(ctrl.build_problem(x, window));
    const BoxQpSolver solver(qp.H);
    const BoxQpResult cold = solver.solve(qp.g, qp.lo, qp.hi, cfg.solver_tol, cfg.solver_max_iter);
    if (ctrl.warm_start().size()) {
      const BoxQpResult warm = solver.solve(qp.g, qp.lo, qp.hi, cfg.solver_tol, cfg.solver_max_iter, &ctrl.warm_start());
      CHECK(warm.objective_trace.front() <= cold.objective_trace.front());
      CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
    }
    x = rk4_step(x, ctrl.step(x, window).u, 0.01, p);
  }
}
