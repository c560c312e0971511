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

#include "drawmpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "drawmpc/errors.hpp"
#include "drawmpc/matrix_io.hpp"

namespace drawmpc {
namespace {

Eigen::MatrixXd input_to_state_map(const StateMatrix& A, const InputMatrix& B, int N) {
  std::vector<InputMatrix> powers(N);  // A^k B
  powers[0] = B;
  for (int k = 1; k < N; ++k) {
    powers[k] = A * powers[k - 1];
  }
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(kStateDim * N, kInputDim * N);
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j <= k; ++j) {
      gamma.block<kStateDim, kInputDim>(kStateDim * k, kInputDim * j) = powers[k - j];
    }
  }
  return gamma;
}

Eigen::VectorXd stacked_state_weights(const StateVector& q, const StateVector& qf, int N) {
  Eigen::VectorXd w(kStateDim * N);
  for (int k = 0; k < N - 1; ++k) {
    w.segment<kStateDim>(kStateDim * k) = q;
  }
  w.segment<kStateDim>(kStateDim * (N - 1)) = qf;
  return w;
}

Eigen::MatrixXd condensed_hessian(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& qbar,
                                  const Eigen::Vector4d& r, int N) {
  Eigen::MatrixXd H = gamma.transpose() * qbar.asDiagonal() * gamma;
  for (int k = 0; k < N; ++k) {
    H.diagonal().segment<kInputDim>(kInputDim * k) += r;
  }
  return 0.5 * (H + H.transpose());
}

struct LinearTerm {
  Eigen::VectorXd g;
  double constant = 0.0;
};

// Gradient and constant of J once the zero-input response is known.
LinearTerm linear_term(const QpProblem& p, const Eigen::MatrixXd& gamma, const Eigen::VectorXd& qbar) {
  const int N = p.horizon;
  Eigen::VectorXd err(kStateDim * N);
  StateVector x = p.x_ic;
  double constant = 0.0;
  for (int k = 0; k < N; ++k) {
    const StateVector e = x - p.x_des[k];
    constant += e.dot(p.q_diag.cwiseProduct(e));
    x = p.A * x;
    err.segment<kStateDim>(kStateDim * k) = x - p.x_des[k + 1];
  }
  const StateVector eN = err.tail<kStateDim>();
  constant += eN.dot(p.qf_diag.cwiseProduct(eN));
  return {gamma.transpose() * qbar.cwiseProduct(err), constant};
}

Eigen::VectorXd clip(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

double half_objective(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(H * x) + g.dot(x);
}

enum class Bound : char { kFree, kLower, kUpper };

}  // namespace

StateVector MpcConfig::default_max_dev_x() {
  StateVector d;
  d << 0.01, 0.01, 0.01, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 5.0, 5.0, 5.0;
  return d;
}

StateVector MpcConfig::state_weight() const { return max_dev_x.array().square().inverse(); }

Eigen::Vector4d MpcConfig::input_weight() const { return max_dev_u.array().square().inverse(); }

StateVector MpcConfig::terminal_weight() const { return terminal_factor * state_weight(); }

void MpcConfig::validate() const {
  if (horizon < 2) throw InvalidArgument("MpcConfig: horizon must be at least 2");
  if (!(max_dev_x.array() > 0.0).all() || !(max_dev_u.array() > 0.0).all()) {
    throw InvalidArgument("MpcConfig: deviations must be positive");
  }
  if (!(terminal_factor > 1.0)) throw InvalidArgument("MpcConfig: terminal_factor must exceed 1");
  if (u_max && !(u_min < *u_max)) throw InvalidArgument("MpcConfig: need u_min < u_max");
  if (!(solver_tol > 0.0) || solver_max_iter < 1) {
    throw InvalidArgument("MpcConfig: solver_tol and solver_max_iter must be positive");
  }
}

ControlBounds control_bounds(const MpcConfig& cfg, const ControlInput& ubar) {
  const double hi = cfg.u_max ? *cfg.u_max : 2.0 * ubar.maxCoeff();
  if (!(cfg.u_min < hi)) throw InvalidArgument("control bounds: need u_min < u_max");
  return {cfg.u_min, hi};
}

void QpProblem::validate() const {
  if (horizon < 1) throw DimensionMismatch("QpProblem: horizon must be positive");
  if (static_cast<int>(x_des.size()) != horizon + 1) {
    throw DimensionMismatch("QpProblem: x_des needs horizon + 1 entries");
  }
  if (!(r_diag.array() > 0.0).all()) throw InvalidArgument("QpProblem: R must be positive definite");
  if ((du_min.array() > du_max.array()).any()) throw InvalidArgument("QpProblem: du_min > du_max");
}

double CondensedQp::objective(const Eigen::VectorXd& U) const { return U.dot(H * U) + 2.0 * g.dot(U) + constant; }

CondensedQp condense(const QpProblem& problem) {
  problem.validate();
  const int N = problem.horizon;
  const Eigen::MatrixXd gamma = input_to_state_map(problem.A, problem.B, N);
  const Eigen::VectorXd qbar = stacked_state_weights(problem.q_diag, problem.qf_diag, N);
  LinearTerm lin = linear_term(problem, gamma, qbar);

  CondensedQp qp;
  qp.H = condensed_hessian(gamma, qbar, problem.r_diag, N);
  qp.g = std::move(lin.g);
  qp.constant = lin.constant;
  qp.lo = problem.du_min.replicate(N, 1);
  qp.hi = problem.du_max.replicate(N, 1);
  return qp;
}

std::vector<StateVector> rollout(const QpProblem& problem, const Eigen::VectorXd& U) {
  if (U.size() != kInputDim * problem.horizon) throw DimensionMismatch("rollout: wrong input length");
  std::vector<StateVector> xs;
  xs.reserve(problem.horizon + 1);
  xs.push_back(problem.x_ic);
  for (int k = 0; k < problem.horizon; ++k) {
    StateVector next = problem.A * xs.back() + problem.B * U.segment<kInputDim>(kInputDim * k);
    xs.push_back(next);
  }
  return xs;
}

void write_qp(std::ostream& out, const CondensedQp& qp) {
  write_matrix_block(out, "H", qp.H);
  write_matrix_block(out, "g", qp.g);
  write_matrix_block(out, "LO", qp.lo);
  write_matrix_block(out, "HI", qp.hi);
}

double kkt_residual(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                    const Eigen::VectorXd& hi, const Eigen::VectorXd& x) {
  if (x.size() == 0) return 0.0;
  return (x - clip(x - (H * x + g), lo, hi)).cwiseAbs().maxCoeff();
}

BoxQpSolver::BoxQpSolver(Eigen::MatrixXd H) : H_(std::move(H)), llt_(H_) {
  if (H_.rows() != H_.cols()) throw DimensionMismatch("BoxQpSolver: H must be square");
  if (llt_.info() != Eigen::Success) throw InvalidArgument("BoxQpSolver: H is not positive definite");
}

BoxQpResult BoxQpSolver::solve(const Eigen::VectorXd& g, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                               double tol, int max_iter, const Eigen::VectorXd* warm_start) const {
  const Eigen::Index n = H_.rows();
  if (g.size() != n || lo.size() != n || hi.size() != n) throw DimensionMismatch("solve_box_qp: size mismatch");
  if ((lo.array() > hi.array()).any()) throw InvalidArgument("solve_box_qp: lo > hi");
  if (warm_start && warm_start->size() != n) throw DimensionMismatch("solve_box_qp: warm start size");

  BoxQpResult result;
  const Eigen::VectorXd unconstrained = llt_.solve(-g);

  // Feasible starting point: the better of the clipped unconstrained
  // minimizer and the clipped warm start.
  Eigen::VectorXd x = clip(unconstrained, lo, hi);
  if (warm_start) {
    Eigen::VectorXd w = clip(*warm_start, lo, hi);
    if (half_objective(H_, g, w) < half_objective(H_, g, x)) x = std::move(w);
  }
  double f = half_objective(H_, g, x);
  result.objective_trace.push_back(f);

  std::vector<Bound> state(n, Bound::kFree);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lo(i) == hi(i) || x(i) <= lo(i)) {
      x(i) = lo(i);
      state[i] = Bound::kLower;
    } else if (x(i) >= hi(i)) {
      x(i) = hi(i);
      state[i] = Bound::kUpper;
    }
  }

  const double scale = 1.0 + g.cwiseAbs().maxCoeff() + H_.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff();
  const double multiplier_tol = 1e-13 * scale;

  bool face_minimum = false;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const Eigen::VectorXd grad = H_ * x + g;

    if (!face_minimum) {
      std::vector<Eigen::Index> free;
      free.reserve(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (state[i] == Bound::kFree) free.push_back(i);
      }
      if (free.empty()) {
        face_minimum = true;
        continue;
      }

      // Newton step restricted to the free variables.
      Eigen::VectorXd p_free;
      if (static_cast<Eigen::Index>(free.size()) == n) {
        p_free = llt_.solve(-grad);
      } else {
        const auto m = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd Hff(m, m);
        Eigen::VectorXd rhs(m);
        for (Eigen::Index a = 0; a < m; ++a) {
          rhs(a) = -grad(free[a]);
          for (Eigen::Index b = 0; b < m; ++b) Hff(a, b) = H_(free[a], free[b]);
        }
        p_free = Hff.llt().solve(rhs);
      }

      double alpha = 1.0;
      Eigen::Index blocking = -1;
      Bound blocking_side = Bound::kFree;
      for (std::size_t a = 0; a < free.size(); ++a) {
        const Eigen::Index i = free[a];
        const double p = p_free(static_cast<Eigen::Index>(a));
        if (p < 0.0) {
          const double step = (lo(i) - x(i)) / p;
          if (step < alpha) {
            alpha = std::max(step, 0.0);
            blocking = i;
            blocking_side = Bound::kLower;
          }
        } else if (p > 0.0) {
          const double step = (hi(i) - x(i)) / p;
          if (step < alpha) {
            alpha = std::max(step, 0.0);
            blocking = i;
            blocking_side = Bound::kUpper;
          }
        }
      }

      Eigen::VectorXd candidate = x;
      for (std::size_t a = 0; a < free.size(); ++a) {
        candidate(free[a]) += alpha * p_free(static_cast<Eigen::Index>(a));
      }
      if (blocking >= 0) {
        candidate(blocking) = blocking_side == Bound::kLower ? lo(blocking) : hi(blocking);
        state[blocking] = blocking_side;
      } else {
        face_minimum = true;
      }
      candidate = clip(candidate, lo, hi);
      const double f_candidate = half_objective(H_, g, candidate);
      // A full Newton step can look like a tiny ascent through rounding; keep
      // the old iterate in that case.
      if (blocking >= 0 || f_candidate <= f) {
        x = std::move(candidate);
        f = f_candidate;
        result.objective_trace.push_back(f);
      }
      continue;
    }

    // On the minimizer of the current face: release the bound with the most
    // negative multiplier, or stop.
    Eigen::Index release = -1;
    double worst = -multiplier_tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] == Bound::kFree || lo(i) == hi(i)) continue;
      const double lambda = state[i] == Bound::kLower ? grad(i) : -grad(i);
      if (lambda < worst) {
        worst = lambda;
        release = i;
      }
    }
    if (release < 0) {
      result.residual = kkt_residual(H_, g, lo, hi, x);
      if (result.residual <= tol) break;
      // Polish with another Newton pass on the same face.
      face_minimum = false;
      continue;
    }
    state[release] = Bound::kFree;
    face_minimum = false;
  }

  result.x = std::move(x);
  result.objective = f;
  result.iterations = std::max(iter, 1);
  result.residual = kkt_residual(H_, g, lo, hi, result.x);
  if (result.residual > tol) {
    std::ostringstream msg;
    msg << "solve_box_qp: KKT residual " << result.residual << " above tolerance " << tol << " after "
        << result.iterations << " iterations";
    throw SolverError(msg.str(), result.x, result.residual);
  }
  return result;
}

BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi, double tol, int max_iter, const Eigen::VectorXd* warm_start) {
  return BoxQpSolver(H).solve(g, lo, hi, tol, max_iter, warm_start);
}

MpcController::MpcController(LinearModel lm, MpcConfig cfg, std::optional<ModelParams> params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
  cfg_.validate();
  bounds_ = control_bounds(cfg_, lm.ubar);
  qbar_ = stacked_state_weights(cfg_.state_weight(), cfg_.terminal_weight(), cfg_.horizon);
  auto add_mode = [&](LinearModel m) {
    Eigen::MatrixXd gamma = input_to_state_map(m.A, m.B, cfg_.horizon);
    BoxQpSolver solver(condensed_hessian(gamma, qbar_, cfg_.input_weight(), cfg_.horizon));
    modes_.push_back(Mode{std::move(m), std::move(gamma), std::move(solver)});
  };
  const double dt = lm.dt;
  add_mode(std::move(lm));
  if (params_ && params_->magnet_mode == MagnetMode::kContactGated) {
    ModelParams free = *params_;
    free.magnet_force = 0.0;
    Equilibrium eq = hover_equilibrium(free);
    eq.state.r.z() = params_->z_contact + 1.0;
    add_mode(linearize(eq.state, eq.control, dt, *params_));
  } else {
    params_.reset();
  }
}

std::size_t MpcController::mode_index(const State& x) const {
  return params_ && !in_contact(x.r, *params_) ? 1 : 0;
}

QpProblem MpcController::build_problem(const State& x_now, std::span<const State> ref_window) const {
  const int N = cfg_.horizon;
  if (static_cast<int>(ref_window.size()) != N + 1) {
    throw DimensionMismatch("mpc_step: reference window must hold horizon + 1 states");
  }
  if (!x_now.is_finite()) throw InvalidArgument("mpc_step: non-finite current state");
  const LinearModel& lm = model_for(x_now);

  QpProblem p;
  p.horizon = N;
  p.A = lm.A;
  p.B = lm.B;
  p.x_ic = lm.to_delta(x_now);
  p.x_des.reserve(N + 1);
  for (const State& s : ref_window) p.x_des.push_back(lm.to_delta(s));
  p.q_diag = cfg_.state_weight();
  p.r_diag = cfg_.input_weight();
  p.qf_diag = cfg_.terminal_weight();
  p.du_min = Eigen::Vector4d::Constant(bounds_.lo) - lm.ubar;
  p.du_max = Eigen::Vector4d::Constant(bounds_.hi) - lm.ubar;
  return p;
}

MpcController::Step MpcController::step(const State& x_now, std::span<const State> ref_window) {
  const QpProblem problem = build_problem(x_now, ref_window);
  const std::size_t mi = mode_index(x_now);
  const Mode& mode = modes_[mi];
  const int N = cfg_.horizon;
  const Eigen::VectorXd lo = problem.du_min.replicate(N, 1);
  const Eigen::VectorXd hi = problem.du_max.replicate(N, 1);

  if (warm_.size() && warm_mode_ != mi) {
    warm_ += (modes_[warm_mode_].lm.ubar - mode.lm.ubar).replicate(N, 1);
  }
  const LinearTerm lin = linear_term(problem, mode.gamma, qbar_);
  const BoxQpResult r = mode.solver.solve(lin.g, lo, hi, cfg_.solver_tol, cfg_.solver_max_iter,
                                          warm_.size() ? &warm_ : nullptr);

  Step out;
  out.solution.du.reserve(N);
  for (int k = 0; k < N; ++k) out.solution.du.push_back(r.x.segment<kInputDim>(kInputDim * k));
  out.solution.dx = rollout(problem, r.x);
  out.solution.objective = 2.0 * r.objective + lin.constant;
  out.solution.residual = r.residual;
  out.solution.iterations = r.iterations;
  out.u = mode.lm.from_delta(out.solution.du.front()).cwiseMax(bounds_.lo).cwiseMin(bounds_.hi);

  warm_.resize(kInputDim * N);
  warm_.head(kInputDim * (N - 1)) = r.x.tail(kInputDim * (N - 1));
  warm_.tail<kInputDim>().setZero();
  warm_mode_ = mi;
  return out;
}

ControlInput mpc_step(const LinearModel& lm, const MpcConfig& cfg, const State& x_now,
                      std::span<const State> ref_window) {
  MpcController controller(lm, cfg);
  return controller.step(x_now, ref_window).u;
}

}  // namespace drawmpc
