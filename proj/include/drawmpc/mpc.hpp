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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drawmpc/discretize.hpp"
#include "drawmpc/model.hpp"
#include "drawmpc/qp.hpp"
#include "drawmpc/trajgen.hpp"

namespace drawmpc {

// Steps treated as the start-up transient when judging tracking quality.
inline constexpr std::size_t kTransientSteps = 100;

struct StepStats {
  int iterations = 0;
  double residual = 0.0;
  double objective = 0.0;
};

struct TrackingErrors {
  Eigen::Vector3d mean_abs = Eigen::Vector3d::Zero();  // per axis, m
  double max_error = 0.0;                              // max Euclidean position error, m
  std::vector<double> position_series;                 // Euclidean error per step
  std::vector<double> velocity_series;                 // Euclidean velocity error per step
};

// Receding-horizon rollout. states[k+1] = rk4_step(states[k], controls[k]);
// states has one entry per unpadded reference sample.
struct SimResult {
  std::vector<State> states;
  std::vector<ControlInput> controls;
  ReferenceTrajectory reference;
  TrackingErrors errors;
  std::vector<StepStats> solver;
  double wall_time_s = 0.0;

  int solver_iterations_total() const;
};

// Thrown by run_simulation; step() is the index of the failing step.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, std::size_t step, bool solver_failure)
      : std::runtime_error(what), step_(step), solver_failure_(solver_failure) {}
  std::size_t step() const { return step_; }
  bool solver_failure() const { return solver_failure_; }

 private:
  std::size_t step_;
  bool solver_failure_;
};

// The plant is the nonlinear RK4 model; the controller uses lm.
SimResult run_simulation(const ReferenceTrajectory& ref, const LinearModel& lm, const MpcConfig& cfg,
                         const ModelParams& p, const State& x0);
// Starts at the first reference state.
SimResult run_simulation(const ReferenceTrajectory& ref, const LinearModel& lm, const MpcConfig& cfg,
                         const ModelParams& p);

// Position errors of `actual` against the first actual.size() reference
// states; both must have equal length once padding is trimmed.
TrackingErrors tracking_errors(const std::vector<State>& reference, const std::vector<State>& actual);

// Max Euclidean position error over steps >= from.
double max_error_after(const TrackingErrors& e, std::size_t from);

// Header t,x,y,z,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz,ax,ay,az with 9 significant
// digits. Accelerations are forward differences of velocity.
void export_fullstate_csv(std::ostream& out, const std::vector<State>& states, double dt);
void export_fullstate_csv(const SimResult& result, const std::filesystem::path& path);

struct FullStateRow {
  double t = 0.0;
  State state;
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
};
std::vector<FullStateRow> read_fullstate_csv(std::istream& in);

}  // namespace drawmpc
