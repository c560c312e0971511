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

#include <Eigen/Dense>

namespace drawmpc {

inline constexpr int kStateDim = 13;
inline constexpr int kInputDim = 4;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using ControlInput = Eigen::Vector4d;  // normalized per-motor commands u1..u4
using Quaternion = Eigen::Vector4d;    // scalar-first (s, v1, v2, v3)

// Quadrotor state: world-frame position and velocity, body-to-world
// attitude quaternion, body-frame angular velocity.
struct State {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Quaternion q = Quaternion(1.0, 0.0, 0.0, 0.0);
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d w = Eigen::Vector3d::Zero();

  // Layout (r, q, v, w).
  StateVector to_vector() const;
  static State from_vector(const StateVector& x);

  bool is_finite() const;
};

enum class MagnetMode { kAlwaysOn, kContactGated };

struct ModelParams {
  double mass = 0.033885;                                                // kg
  Eigen::Vector3d inertia = Eigen::Vector3d(1.66e-5, 1.66e-5, 2.93e-5);  // kg m^2, diagonal
  double thrust_coeff = 0.147;                                           // N per unit command
  double torque_coeff = 1.18e-4;                                         // N m per unit command
  double arm_length = 0.046 / 1.4142135623730951;                        // m
  double gravity = 9.8;                                                  // m/s^2
  double friction_mu = 0.35;
  double magnet_force = 2.0;                                             // N, pulls toward -z
  double v_eps = 0.1;                                                    // m/s, tanh smoothing
  MagnetMode magnet_mode = MagnetMode::kAlwaysOn;
  double z_contact = 0.005;                                              // m, gated mode only

  // Throws InvalidArgument when a physical constant is out of range.
  void validate() const;
};

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

// Rotation taking body-frame vectors to the world frame. Non-unit input is
// renormalized first.
Eigen::Matrix3d quat_to_rotmat(const Quaternion& q);

// Left-multiplication matrix L(q) = [[s, -v^T], [v, sI + skew(v)]].
Eigen::Matrix4d quat_left_matrix(const Quaternion& q);

// q_dot = 0.5 L(q) H w, H = [0; I3].
Quaternion quat_kinematics(const Quaternion& q, const Eigen::Vector3d& w);

// 3x4 map from motor commands to body torques (roll, pitch, yaw).
Eigen::Matrix<double, 3, 4> mixing_matrix(const ModelParams& p);

Eigen::Vector3d thrust_force_body(const ControlInput& u, const ModelParams& p);
Eigen::Vector3d body_torques(const ControlInput& u, const ModelParams& p);

// Smoothed sliding friction -mu m g tanh(v/v_eps) on x and y; zero on z.
Eigen::Vector3d friction_force(const Eigen::Vector3d& v, const ModelParams& p);

Eigen::Vector3d magnet_force(const Eigen::Vector3d& r, const ModelParams& p);

// Whether the magnet tip touches the board. Always true in always-on mode.
bool in_contact(const Eigen::Vector3d& r, const ModelParams& p);

// Full 13-state derivative. Friction acts only while in contact.
StateVector continuous_dynamics(const State& x, const ControlInput& u, const ModelParams& p);
StateVector continuous_dynamics(const StateVector& x, const ControlInput& u, const ModelParams& p);
// Same, with the contact mode supplied instead of read from x.r.
StateVector continuous_dynamics(const State& x, const ControlInput& u, const ModelParams& p, bool contact);

}  // namespace drawmpc
