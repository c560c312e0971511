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

#include "drawmpc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "drawmpc/errors.hpp"

namespace drawmpc {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::logic_error&) {
  }
  throw ParseError("config: key '" + key + "' expects a number, got '" + value + "'");
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v)) throw ParseError("config: key '" + key + "' expects an integer");
  return static_cast<int>(v);
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string key, value;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      key = trim(line.substr(0, eq));
      value = trim(line.substr(eq + 1));
    } else {
      const auto sp = line.find_first_of(" \t");
      if (sp == std::string::npos) throw ParseError("config: expected 'key = value'", line_no);
      key = trim(line.substr(0, sp));
      value = trim(line.substr(sp + 1));
    }
    if (key.empty() || value.empty()) throw ParseError("config: expected 'key = value'", line_no);
    kv[key] = value;
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_key_values(in);
}

std::string magnet_mode_name(MagnetMode mode) {
  return mode == MagnetMode::kAlwaysOn ? "always-on" : "contact-gated";
}

MagnetMode parse_magnet_mode(const std::string& name) {
  if (name == "always-on") return MagnetMode::kAlwaysOn;
  if (name == "contact-gated") return MagnetMode::kContactGated;
  throw ParseError("config: magnet_mode must be always-on or contact-gated, got '" + name + "'");
}

void apply_key_values(const KeyValues& kv, RunParams& params) {
  ModelParams& m = params.model;
  MpcConfig& c = params.mpc;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const auto num = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = to_double(k, v); };
  };
  const auto dev = [&c](std::initializer_list<int> idx) -> Setter {
    return [&c, idx](const std::string& k, const std::string& v) {
      const double d = to_double(k, v);
      for (int i : idx) c.max_dev_x(i) = d;
    };
  };
  const std::map<std::string, Setter> setters = {
      {"mass", num(m.mass)},
      {"inertia_xx", num(m.inertia.x())},
      {"inertia_yy", num(m.inertia.y())},
      {"inertia_zz", num(m.inertia.z())},
      {"thrust_coeff", num(m.thrust_coeff)},
      {"torque_coeff", num(m.torque_coeff)},
      {"arm_length", num(m.arm_length)},
      {"gravity", num(m.gravity)},
      {"friction_mu", num(m.friction_mu)},
      {"magnet_force", num(m.magnet_force)},
      {"v_eps", num(m.v_eps)},
      {"magnet_mode", [&m](const std::string&, const std::string& v) { m.magnet_mode = parse_magnet_mode(v); }},
      {"z_contact", num(m.z_contact)},
      {"horizon", [&c](const std::string& k, const std::string& v) { c.horizon = to_int(k, v); }},
      {"dt", num(params.dt)},
      {"max_dev_pos", dev({0, 1, 2})},
      {"max_dev_quat", dev({3, 4, 5, 6})},
      {"max_dev_vel", dev({7, 8, 9})},
      {"max_dev_omega", dev({10, 11, 12})},
      {"max_dev_u", [&c](const std::string& k, const std::string& v) { c.max_dev_u.setConstant(to_double(k, v)); }},
      {"terminal_factor", num(c.terminal_factor)},
      {"u_min", num(c.u_min)},
      {"u_max", [&c](const std::string& k, const std::string& v) { c.u_max = to_double(k, v); }},
      {"solver_tol", num(c.solver_tol)},
      {"solver_max_iter", [&c](const std::string& k, const std::string& v) { c.solver_max_iter = to_int(k, v); }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("config: unknown key '" + key + "'");
    it->second(key, value);
  }
}

nlohmann::json to_json(const ModelParams& p) {
  return {
      {"mass", p.mass},
      {"inertia_xx", p.inertia.x()},
      {"inertia_yy", p.inertia.y()},
      {"inertia_zz", p.inertia.z()},
      {"thrust_coeff", p.thrust_coeff},
      {"torque_coeff", p.torque_coeff},
      {"arm_length", p.arm_length},
      {"gravity", p.gravity},
      {"friction_mu", p.friction_mu},
      {"magnet_force", p.magnet_force},
      {"v_eps", p.v_eps},
      {"magnet_mode", magnet_mode_name(p.magnet_mode)},
      {"z_contact", p.z_contact},
  };
}

nlohmann::json to_json(const MpcConfig& cfg) {
  nlohmann::json j = {
      {"horizon", cfg.horizon},
      {"max_dev_x", std::vector<double>(cfg.max_dev_x.data(), cfg.max_dev_x.data() + kStateDim)},
      {"max_dev_u", std::vector<double>(cfg.max_dev_u.data(), cfg.max_dev_u.data() + kInputDim)},
      {"terminal_factor", cfg.terminal_factor},
      {"u_min", cfg.u_min},
      {"solver_tol", cfg.solver_tol},
      {"solver_max_iter", cfg.solver_max_iter},
  };
  j["u_max"] = cfg.u_max ? nlohmann::json(*cfg.u_max) : nlohmann::json("2*hover");
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::json provenance(const RunParams& params, const nlohmann::json& extra) {
  nlohmann::json block = {
      {"model", to_json(params.model)},
      {"mpc", to_json(params.mpc)},
      {"dt", params.dt},
      {"inputs", extra},
  };
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a64(block.dump())));
  block["config_hash"] = std::string("fnv1a64:") + hex;
  return block;
}

}  // namespace drawmpc
