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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "drawmpc/model.hpp"
#include "drawmpc/qp.hpp"

namespace drawmpc {

// Flat `key = value` (or `key value`) lines; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;
KeyValues read_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

// Model keys: mass, inertia_xx, inertia_yy, inertia_zz, thrust_coeff,
// torque_coeff, arm_length, gravity, friction_mu, magnet_force, v_eps,
// magnet_mode (always-on | contact-gated), z_contact.
// Controller keys: horizon, dt, max_dev_pos, max_dev_quat, max_dev_vel,
// max_dev_omega, max_dev_u, terminal_factor, u_min, u_max, solver_tol,
// solver_max_iter.
// Unknown keys and unparsable values throw ParseError.
struct RunParams {
  ModelParams model;
  MpcConfig mpc;
  double dt = 0.01;
};
void apply_key_values(const KeyValues& kv, RunParams& params);

std::string magnet_mode_name(MagnetMode mode);
MagnetMode parse_magnet_mode(const std::string& name);

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const MpcConfig& cfg);

// Parameter block plus a 64-bit FNV-1a hash of its canonical dump.
nlohmann::json provenance(const RunParams& params, const nlohmann::json& extra = nlohmann::json::object());
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace drawmpc
