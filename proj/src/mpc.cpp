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

#include "drawmpc/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "drawmpc/errors.hpp"
#include "drawmpc/matrix_io.hpp"

namespace drawmpc {

int SimResult::solver_iterations_total() const {
  int total = 0;
  for (const auto& s : solver) total += s.iterations;
  return total;
}

SimResult run_simulation(const ReferenceTrajectory& ref, const LinearModel& lm, const MpcConfig& cfg,
                         const ModelParams& p, const State& x0) {
  cfg.validate();
  p.validate();
  const auto N = static_cast<std::size_t>(cfg.horizon);
  const std::size_t n = ref.unpadded_size();
  if (n == 0 || ref.states.size() < N + 1 || ref.states.size() + 1 < n + N) {
    throw InvalidArgument("run_simulation: reference must be padded with at least horizon - 1 terminal states");
  }
  if (std::abs(ref.dt - lm.dt) > 1e-12) throw InvalidArgument("run_simulation: reference dt differs from model dt");
  if (!x0.is_finite()) throw InvalidArgument("run_simulation: non-finite initial state");

  const auto started = std::chrono::steady_clock::now();
  SimResult result;
  result.reference = ref;
  result.states.reserve(n);
  result.controls.reserve(n);
  result.solver.reserve(n);
  result.states.push_back(x0);

  MpcController controller(lm, cfg, p);
  const std::span<const State> all(ref.states);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const State& x = result.states.back();
    MpcController::Step step;
    try {
      step = controller.step(x, all.subspan(k, N + 1));
    } catch (const SolverError& e) {
      throw SimulationError("step " + std::to_string(k) + ": " + e.what(), k, true);
    }
    State next;
    try {
      next = rk4_step(x, step.u, lm.dt, p);
    } catch (const IntegrationFailure& e) {
      throw SimulationError("step " + std::to_string(k) + ": " + e.what(), k, false);
    }
    result.controls.push_back(step.u);
    result.solver.push_back({step.solution.iterations, step.solution.residual, step.solution.objective});
    result.states.push_back(next);
  }

  result.errors = tracking_errors(std::vector<State>(ref.states.begin(), ref.states.begin() + static_cast<std::ptrdiff_t>(n)),
                                  result.states);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

SimResult run_simulation(const ReferenceTrajectory& ref, const LinearModel& lm, const MpcConfig& cfg,
                         const ModelParams& p) {
  if (ref.states.empty()) throw InvalidArgument("run_simulation: empty reference");
  return run_simulation(ref, lm, cfg, p, ref.states.front());
}

TrackingErrors tracking_errors(const std::vector<State>& reference, const std::vector<State>& actual) {
  if (reference.size() != actual.size()) throw DimensionMismatch("tracking_errors: length mismatch");
  TrackingErrors e;
  if (actual.empty()) return e;
  e.position_series.reserve(actual.size());
  e.velocity_series.reserve(actual.size());
  for (std::size_t k = 0; k < actual.size(); ++k) {
    const Eigen::Vector3d dr = reference[k].r - actual[k].r;
    e.mean_abs += dr.cwiseAbs();
    e.position_series.push_back(dr.norm());
    e.velocity_series.push_back((reference[k].v - actual[k].v).norm());
    e.max_error = std::max(e.max_error, dr.norm());
  }
  e.mean_abs /= static_cast<double>(actual.size());
  return e;
}

double max_error_after(const TrackingErrors& e, std::size_t from) {
  double worst = 0.0;
  for (std::size_t k = from; k < e.position_series.size(); ++k) worst = std::max(worst, e.position_series[k]);
  return worst;
}

void export_fullstate_csv(std::ostream& out, const std::vector<State>& states, double dt) {
  out << "t,x,y,z,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz,ax,ay,az\n";
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k + 1 < states.size()) accel = (states[k + 1].v - states[k].v) / dt;
    Eigen::Matrix<double, 17, 1> row;
    row << static_cast<double>(k) * dt, states[k].to_vector(), accel;
    for (int i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_number(row(i), 9);
    }
    out << '\n';
  }
}

void export_fullstate_csv(const SimResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  export_fullstate_csv(out, result.states, result.reference.dt);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<FullStateRow> read_fullstate_csv(std::istream& in) {
  std::vector<FullStateRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line_no == 1 && line.rfind("t,", 0) == 0) continue;
    std::istringstream ss(line);
    Eigen::Matrix<double, 17, 1> v;
    for (int i = 0; i < 17; ++i) {
      std::string field;
      if (!std::getline(ss, field, ',')) throw ParseError("full-state csv: expected 17 columns", line_no);
      try {
        std::size_t used = 0;
        v(i) = std::stod(field, &used);
        if (used != field.size() && field.find_first_not_of(" \r", used) != std::string::npos) {
          throw ParseError("full-state csv: bad number", line_no);
        }
      } catch (const std::logic_error&) {
        throw ParseError("full-state csv: bad number", line_no);
      }
    }
    FullStateRow row;
    row.t = v(0);
    row.state = State::from_vector(v.segment<kStateDim>(1));
    row.accel = v.tail<3>();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace drawmpc
