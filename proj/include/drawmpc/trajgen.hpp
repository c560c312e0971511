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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "drawmpc/image.hpp"
#include "drawmpc/model.hpp"

namespace drawmpc {

inline constexpr double kDefaultDt = 0.01;         // s, 100 Hz
inline constexpr double kDefaultSpeedCap = 0.01;   // m/s
inline constexpr double kCurvatureFloor = 1e-2;    // 1/m
inline constexpr double kStraightCurvature = 0.5;  // 1/m
inline constexpr double kStraightBoost = 2.0;
inline constexpr std::size_t kTspSeeds = 16;

// Board-frame drawing path. z = 0 is the board surface.
struct WaypointPath {
  std::vector<Eigen::Vector3d> points;
  std::optional<std::vector<Eigen::Vector3d>> velocities;
  double dt = kDefaultDt;
  std::vector<bool> pen;  // true while the magnet touches the board

  std::size_t size() const { return points.size(); }
  void validate() const;
};

// Desired full states, the last `padding` entries being copies of the
// terminal state.
struct ReferenceTrajectory {
  std::vector<State> states;
  double dt = kDefaultDt;
  std::size_t padding = 0;

  std::size_t unpadded_size() const { return states.size() - padding; }
};

// Gerono lemniscate x = a sin t, y = a sin t cos t on t in [0, 2 pi).
WaypointPath figure8(int n_points, double half_width, const Eigen::Vector3d& center);
WaypointPath circle(int n_points, double radius, const Eigen::Vector3d& center);

// Two numeric columns per row; a non-numeric first row is taken as a header.
std::vector<Eigen::Vector2d> read_points_csv(std::istream& in);

// Uniform scale + translation fitting the bounding box inside the board,
// centered on `center`. Throws InvalidArgument if all points coincide.
WaypointPath normalize_to_board(std::span<const Eigen::Vector2d> points, double board_width, double board_height,
                                const Eigen::Vector3d& center);

WaypointPath load_points_csv(const std::filesystem::path& path, double board_width, double board_height,
                             const Eigen::Vector3d& center);

// Open-path visiting order: nearest-neighbour tours from up to kTspSeeds
// start points (the leftmost-lowest first), each refined with 2-opt and
// Or-opt moves; the shortest is returned.
std::vector<std::size_t> tsp_order(std::span<const Eigen::Vector2d> points);
double path_length(std::span<const Eigen::Vector2d> points, std::span<const std::size_t> order);

// Reciprocal circumradius; 0 for collinear triples.
double menger_curvature(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c);

WaypointPath velocity_profile_curvature(const WaypointPath& path, double v_cap = kDefaultSpeedCap,
                                        double straight_boost = kStraightBoost);
WaypointPath velocity_profile_finite_diff(const WaypointPath& path, double v_cap = kDefaultSpeedCap);

// Each break (i, j), i < j, drops the points strictly between i and j and
// inserts a rise / translate / descend arc at height z_up with the pen up.
// Breaks must be ordered and non-overlapping.
using SegmentBreak = std::pair<std::size_t, std::size_t>;
WaypointPath insert_liftoff(const WaypointPath& path, std::span<const SegmentBreak> breaks, double z_up);

// n points evenly spaced in arc length. Pen stays down on a sample only if
// the segment it lies on is drawn. Velocities are dropped.
WaypointPath resample_uniform(const WaypointPath& path, std::size_t n);

// Skeleton pixels, TSP-ordered, fitted to the board, with pen-up hops
// wherever consecutive pixels are farther apart than jump_pixels.
WaypointPath glyph_path(const BinaryImage& glyph, double board_width, double board_height,
                        const Eigen::Vector3d& center, double z_up, double jump_pixels = 5.0);

// Level-attitude full states from positions and velocities, padded with
// `horizon` copies of the terminal state. Throws InvalidArgument without
// velocities.
ReferenceTrajectory lift_to_reference(const WaypointPath& path, int horizon);

// Header `x,y,z,vx,vy,vz,pen`.
void write_waypoints_csv(std::ostream& out, const WaypointPath& path);
WaypointPath read_waypoints_csv(std::istream& in, double dt = kDefaultDt);

// "i j" per line.
std::vector<SegmentBreak> read_breaks(std::istream& in);

}  // namespace drawmpc
