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

#include "drawmpc/model.hpp"

#include <cmath>

#include "drawmpc/errors.hpp"

namespace drawmpc {

StateVector State::to_vector() const {
  StateVector x;
  x << r, q, v, w;
  return x;
}

State State::from_vector(const StateVector& x) {
  State s;
  s.r = x.segment<3>(0);
  s.q = x.segment<4>(3);
  s.v = x.segment<3>(7);
  s.w = x.segment<3>(10);
  return s;
}

bool State::is_finite() const {
  return r.allFinite() && q.allFinite() && v.allFinite() && w.allFinite();
}

void ModelParams::validate() const {
  if (!(mass > 0.0) || !(thrust_coeff > 0.0) || !(torque_coeff > 0.0) || !(arm_length > 0.0)) {
    throw InvalidArgument("mass, thrust_coeff, torque_coeff and arm_length must be positive");
  }
  if (!(inertia.minCoeff() > 0.0)) {
    throw InvalidArgument("inertia diagonal must be positive");
  }
  if (!(friction_mu >= 0.0) || !(magnet_force >= 0.0) || !(v_eps > 0.0)) {
    throw InvalidArgument("need friction_mu >= 0, magnet_force >= 0, v_eps > 0");
  }
  if (!std::isfinite(gravity) || !std::isfinite(z_contact)) {
    throw InvalidArgument("gravity and z_contact must be finite");
  }
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d quat_to_rotmat(const Quaternion& q) {
  if (!q.allFinite()) {
    throw InvalidArgument("quat_to_rotmat: non-finite quaternion");
  }
  const double n = q.norm();
  if (n == 0.0) {
    throw InvalidArgument("quat_to_rotmat: zero quaternion");
  }
  const Quaternion u = q / n;
  const double s = u(0);
  const Eigen::Vector3d v = u.tail<3>();
  const Eigen::Matrix3d V = skew(v);
  // R = (s^2 - v.v) I + 2 v v^T + 2 s skew(v)
  return (s * s - v.dot(v)) * Eigen::Matrix3d::Identity() + 2.0 * v * v.transpose() + 2.0 * s * V;
}

Eigen::Matrix4d quat_left_matrix(const Quaternion& q) {
  const double s = q(0);
  const Eigen::Vector3d v = q.tail<3>();
  Eigen::Matrix4d L;
  L(0, 0) = s;
  L.block<1, 3>(0, 1) = -v.transpose();
  L.block<3, 1>(1, 0) = v;
  L.block<3, 3>(1, 1) = s * Eigen::Matrix3d::Identity() + skew(v);
  return L;
}

Quaternion quat_kinematics(const Quaternion& q, const Eigen::Vector3d& w) {
  Eigen::Matrix<double, 4, 3> H = Eigen::Matrix<double, 4, 3>::Zero();
  H.bottomRows<3>().setIdentity();
  return 0.5 * quat_left_matrix(q) * H * w;
}

Eigen::Matrix<double, 3, 4> mixing_matrix(const ModelParams& p) {
  const double a = p.arm_length * p.thrust_coeff;
  const double k = p.torque_coeff;
  Eigen::Matrix<double, 3, 4> m;
  m << -a, -a, a, a,
       -a, a, a, -a,
       -k, k, -k, k;
  return m;
}

Eigen::Vector3d thrust_force_body(const ControlInput& u, const ModelParams& p) {
  return {0.0, 0.0, p.thrust_coeff * u.sum()};
}

Eigen::Vector3d body_torques(const ControlInput& u, const ModelParams& p) {
  return mixing_matrix(p) * u;
}

Eigen::Vector3d friction_force(const Eigen::Vector3d& v, const ModelParams& p) {
  const double scale = p.friction_mu * p.mass * p.gravity;
  return {-scale * std::tanh(v.x() / p.v_eps), -scale * std::tanh(v.y() / p.v_eps), 0.0};
}

bool in_contact(const Eigen::Vector3d& r, const ModelParams& p) {
  return p.magnet_mode == MagnetMode::kAlwaysOn || r.z() <= p.z_contact;
}

Eigen::Vector3d magnet_force(const Eigen::Vector3d& r, const ModelParams& p) {
  if (!in_contact(r, p)) {
    return Eigen::Vector3d::Zero();
  }
  return {0.0, 0.0, -p.magnet_force};
}

StateVector continuous_dynamics(const State& x, const ControlInput& u, const ModelParams& p) {
  return continuous_dynamics(x, u, p, in_contact(x.r, p));
}

StateVector continuous_dynamics(const State& x, const ControlInput& u, const ModelParams& p, bool contact) {
  if (!x.is_finite() || !u.allFinite()) {
    throw InvalidArgument("continuous_dynamics: non-finite state or input");
  }
  Eigen::Vector3d force = quat_to_rotmat(x.q) * thrust_force_body(u, p);
  if (contact) {
    force += Eigen::Vector3d(0.0, 0.0, -p.magnet_force) + friction_force(x.v, p);
  }
  const Eigen::Vector3d v_dot = Eigen::Vector3d(0.0, 0.0, -p.gravity) + force / p.mass;

  // Euler's equations with a diagonal inertia.
  const Eigen::Vector3d Jw = p.inertia.cwiseProduct(x.w);
  const Eigen::Vector3d w_dot = (body_torques(u, p) - x.w.cross(Jw)).cwiseQuotient(p.inertia);

  StateVector dx;
  dx << x.v, quat_kinematics(x.q, x.w), v_dot, w_dot;
  return dx;
}

StateVector continuous_dynamics(const StateVector& x, const ControlInput& u, const ModelParams& p) {
  return continuous_dynamics(State::from_vector(x), u, p);
}

}  // namespace drawmpc
