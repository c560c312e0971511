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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "drawmpc/config.hpp"
#include "drawmpc/discretize.hpp"
#include "drawmpc/trajgen.hpp"

namespace drawmpc {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitStabilityFailure = 3,
  kExitSolverFailure = 4,
};

enum class InputKind { kShape, kPointsCsv, kGlyph, kWaypoints };
enum class VelocityProfile { kCurvature, kFiniteDiff };

struct RunSpec {
  InputKind input = InputKind::kShape;
  std::string shape = "fig8";            // fig8 | circle | hover
  std::filesystem::path source;          // csv, glyph or waypoint file
  std::optional<std::filesystem::path> breaks;
  double board_width = 0.2;              // m
  double board_height = 0.2;             // m
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  VelocityProfile profile = VelocityProfile::kFiniteDiff;
  std::optional<int> points;             // resample count; shapes default to 1000
  double z_up = 0.02;                    // lift-off height, m
  RunParams params;
  std::filesystem::path out_dir = ".";

  void validate() const;
};

// Preset configurations: fig8-1000-N75, circle-1000-N75,
// cloud-1000-N20, hi-1001-N20, human-1582-N20.
std::vector<std::string> scenario_names();
std::optional<RunSpec> scenario_preset(const std::string& name, const std::filesystem::path& data_dir);

// Waypoints with velocities, before padding.
WaypointPath build_waypoints(const RunSpec& spec);

struct CheckReport {
  Equilibrium equilibrium;
  double equilibrium_residual = 0.0;
  double spectral_radius = 0.0;
  LinearModel model;

  bool passed() const { return equilibrium_residual < 1e-8 && spectral_radius < 1.0; }
};

// Equilibrium residual, linearization and closed-loop LQR spectral radius
// using the MPC weights. Throws EquilibriumError / NoConvergence.
CheckReport run_checks(const RunParams& params);

// Metrics JSON comparing a reference (waypoint or full-state CSV) with a
// full-state CSV. Throws DimensionMismatch on unequal lengths.
nlohmann::json compare_trajectory_files(const std::filesystem::path& reference, const std::filesystem::path& actual);

// Full command line, argv[0] included. Returns an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace drawmpc
