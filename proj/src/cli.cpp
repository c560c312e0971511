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

#include "drawmpc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "drawmpc/errors.hpp"
#include "drawmpc/matrix_io.hpp"
#include "drawmpc/mpc.hpp"
#include "drawmpc/qp.hpp"

namespace drawmpc {
namespace fs = std::filesystem;

namespace {

// Raw command-line values; unset flags leave the preset/config value alone.
struct Flags {
  std::string scenario;
  std::string config;
  std::string shape;
  std::optional<int> points;
  std::string csv;
  std::string glyph;
  std::string waypoints;
  std::string breaks;
  std::optional<double> board_w;
  std::optional<double> board_h;
  std::string center;
  std::string profile;
  std::optional<int> horizon;
  std::optional<double> dt;
  std::string magnet;
  std::optional<double> z_up;
  std::string out;
  std::string data_dir = DRAWMPC_DATA_DIR;
};

void add_run_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--scenario", f.scenario, "Preset: fig8-1000-N75, circle-1000-N75, cloud-1000-N20, hi-1001-N20, human-1582-N20");
  cmd.add_option("--config", f.config, "Flat key = value parameter file");
  cmd.add_option("--shape", f.shape, "Analytic shape: fig8, circle, hover");
  cmd.add_option("--points", f.points, "Number of drawing points");
  cmd.add_option("--csv", f.csv, "Two-column x,y point file");
  cmd.add_option("--glyph", f.glyph, "PBM glyph to skeletonize");
  cmd.add_option("--breaks", f.breaks, "Lift-off index pairs for --csv input");
  cmd.add_option("--board-w", f.board_w, "Board width, m");
  cmd.add_option("--board-h", f.board_h, "Board height, m");
  cmd.add_option("--center", f.center, "Drawing center x,y,z in m");
  cmd.add_option("--profile", f.profile, "Velocity profile: curvature or finite-diff");
  cmd.add_option("--horizon", f.horizon, "MPC horizon, steps");
  cmd.add_option("--dt", f.dt, "Time step, s");
  cmd.add_option("--magnet", f.magnet, "Magnet model: on, off, gated");
  cmd.add_option("--z-up", f.z_up, "Lift-off height, m");
  cmd.add_option("--out", f.out, "Output directory");
  cmd.add_option("--data-dir", f.data_dir, "Directory holding scenario data");
}

Eigen::Vector3d parse_center(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      v.push_back(std::stod(field));
    } catch (const std::logic_error&) {
      throw InvalidArgument("--center expects x,y,z");
    }
  }
  if (v.size() == 2) v.push_back(0.0);
  if (v.size() != 3) throw InvalidArgument("--center expects x,y,z");
  return {v[0], v[1], v[2]};
}

RunSpec resolve_spec(const Flags& f) {
  RunSpec spec;
  if (!f.scenario.empty()) {
    auto preset = scenario_preset(f.scenario, f.data_dir);
    if (!preset) throw InvalidArgument("unknown scenario '" + f.scenario + "'");
    spec = *preset;
  }
  if (!f.config.empty()) apply_key_values(read_key_values(fs::path(f.config)), spec.params);

  const int inputs = !f.shape.empty() + !f.csv.empty() + !f.glyph.empty() + !f.waypoints.empty();
  if (inputs > 1) throw InvalidArgument("give exactly one of --shape, --csv, --glyph, --waypoints");
  if (!f.shape.empty()) {
    spec.input = InputKind::kShape;
    spec.shape = f.shape;
    spec.breaks.reset();
  } else if (!f.csv.empty()) {
    spec.input = InputKind::kPointsCsv;
    spec.source = f.csv;
    spec.breaks.reset();
  } else if (!f.glyph.empty()) {
    spec.input = InputKind::kGlyph;
    spec.source = f.glyph;
    spec.breaks.reset();
  } else if (!f.waypoints.empty()) {
    spec.input = InputKind::kWaypoints;
    spec.source = f.waypoints;
  }
  if (!f.breaks.empty()) spec.breaks = fs::path(f.breaks);
  if (f.points) spec.points = *f.points;
  if (f.board_w) spec.board_width = *f.board_w;
  if (f.board_h) spec.board_height = *f.board_h;
  if (!f.center.empty()) spec.center = parse_center(f.center);
  if (!f.profile.empty()) {
    if (f.profile == "curvature") {
      spec.profile = VelocityProfile::kCurvature;
    } else if (f.profile == "finite-diff") {
      spec.profile = VelocityProfile::kFiniteDiff;
    } else {
      throw InvalidArgument("--profile must be curvature or finite-diff");
    }
  }
  if (f.horizon) spec.params.mpc.horizon = *f.horizon;
  if (f.dt) spec.params.dt = *f.dt;
  if (!f.magnet.empty()) {
    if (f.magnet == "on") {
      spec.params.model.magnet_mode = MagnetMode::kAlwaysOn;
    } else if (f.magnet == "off") {
      spec.params.model.magnet_mode = MagnetMode::kAlwaysOn;
      spec.params.model.magnet_force = 0.0;
    } else if (f.magnet == "gated") {
      spec.params.model.magnet_mode = MagnetMode::kContactGated;
    } else {
      throw InvalidArgument("--magnet must be on, off or gated");
    }
  }
  if (f.z_up) spec.z_up = *f.z_up;
  if (!f.out.empty()) spec.out_dir = f.out;
  spec.validate();
  return spec;
}

std::vector<State> read_trajectory_states(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  in.clear();
  in.seekg(0);
  std::vector<State> states;
  if (first.rfind("t,", 0) == 0) {
    for (const auto& row : read_fullstate_csv(in)) states.push_back(row.state);
  } else {
    const WaypointPath path = read_waypoints_csv(in);
    for (std::size_t i = 0; i < path.size(); ++i) {
      State s;
      s.r = path.points[i];
      s.v = (*path.velocities)[i];
      states.push_back(s);
    }
  }
  return states;
}

nlohmann::json vec3_json(const Eigen::Vector3d& v) { return {{"x", v.x()}, {"y", v.y()}, {"z", v.z()}}; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

nlohmann::json input_description(const RunSpec& spec) {
  static const char* kinds[] = {"shape", "points-csv", "glyph", "waypoints"};
  nlohmann::json j = {
      {"kind", kinds[static_cast<int>(spec.input)]},
      {"board_w", spec.board_width},
      {"board_h", spec.board_height},
      {"center", {spec.center.x(), spec.center.y(), spec.center.z()}},
      {"profile", spec.profile == VelocityProfile::kCurvature ? "curvature" : "finite-diff"},
      {"z_up", spec.z_up},
  };
  if (spec.input == InputKind::kShape) {
    j["shape"] = spec.shape;
  } else {
    j["source"] = spec.source.filename().string();
  }
  if (spec.points) j["points"] = *spec.points;
  if (spec.breaks) j["breaks"] = spec.breaks->filename().string();
  return j;
}

int cmd_generate(const Flags& flags, std::ostream& out) {
  const RunSpec spec = resolve_spec(flags);
  const WaypointPath path = build_waypoints(spec);
  fs::create_directories(spec.out_dir);
  std::ostringstream csv;
  write_waypoints_csv(csv, path);
  const fs::path file = spec.out_dir / "waypoints.csv";
  write_text(file, csv.str());
  double vmax = 0.0;
  for (const auto& v : *path.velocities) vmax = std::max(vmax, v.norm());
  out << "points " << path.size() << "\nmax_speed_m_s " << format_number(vmax, 9) << "\nwrote " << file.string()
      << '\n';
  return kExitOk;
}

void print_check(std::ostream& out, const CheckReport& r) {
  out << "hover_control " << format_number(r.equilibrium.control(0), 9) << '\n'
      << "equilibrium_residual " << format_number(r.equilibrium_residual, 6) << '\n'
      << "spectral_radius " << format_number(r.spectral_radius, 9) << '\n'
      << "status " << (r.passed() ? "ok" : "FAILED") << '\n';
}

int cmd_check(const Flags& flags, const std::string& dump_model, const std::string& dump_qp, std::ostream& out) {
  const RunSpec spec = resolve_spec(flags);
  const CheckReport report = run_checks(spec.params);
  print_check(out, report);
  if (!dump_model.empty()) {
    std::ostringstream text;
    write_linear_model(text, report.model);
    write_text(dump_model, text.str());
  }
  if (!dump_qp.empty()) {
    // Hover-tracking-hover instance at the configured horizon.
    MpcController controller(report.model, spec.params.mpc, spec.params.model);
    const std::vector<State> window(static_cast<std::size_t>(spec.params.mpc.horizon) + 1, report.model.xbar);
    std::ostringstream text;
    write_qp(text, condense(controller.build_problem(report.model.xbar, window)));
    write_text(dump_qp, text.str());
  }
  return report.passed() ? kExitOk : kExitStabilityFailure;
}

int cmd_optimize(const Flags& flags, std::ostream& out, std::ostream& err) {
  const RunSpec spec = resolve_spec(flags);
  const WaypointPath path = build_waypoints(spec);

  CheckReport report;
  try {
    report = run_checks(spec.params);
  } catch (const EquilibriumError& e) {
    err << "error: " << e.what() << '\n';
    return kExitStabilityFailure;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitStabilityFailure;
  }
  print_check(out, report);
  if (!report.passed()) {
    err << "error: stability check failed\n";
    return kExitStabilityFailure;
  }

  const ReferenceTrajectory ref = lift_to_reference(path, spec.params.mpc.horizon);
  SimResult result;
  try {
    result = run_simulation(ref, report.model, spec.params.mpc, spec.params.model);
  } catch (const SimulationError& e) {
    err << "error: " << e.what() << '\n';
    return e.solver_failure() ? kExitSolverFailure : kExitStabilityFailure;
  }

  fs::create_directories(spec.out_dir);
  const fs::path waypoints_file = spec.out_dir / "waypoints.csv";
  const fs::path fullstate_file = spec.out_dir / "fullstate.csv";
  const fs::path metrics_file = spec.out_dir / "metrics.json";
  std::ostringstream wp, fsx;
  write_waypoints_csv(wp, path);
  export_fullstate_csv(fsx, result.states, ref.dt);
  write_text(waypoints_file, wp.str());
  write_text(fullstate_file, fsx.str());

  // Metrics come from the written files so `metrics` reproduces them exactly.
  nlohmann::json metrics = compare_trajectory_files(waypoints_file, fullstate_file);
  metrics["solver_iters_total"] = result.solver_iterations_total();
  metrics["provenance"] = provenance(spec.params, input_description(spec));
  write_text(metrics_file, metrics.dump(2) + "\n");

  out << "steps " << result.states.size() << '\n'
      << "max_error_after_transient_m " << format_number(max_error_after(result.errors, kTransientSteps), 6) << '\n'
      << "wall_time_s " << format_number(result.wall_time_s, 4) << '\n'
      << "wrote " << fullstate_file.string() << ", " << metrics_file.string() << '\n';
  return kExitOk;
}

}  // namespace

void RunSpec::validate() const {
  if (!(board_width > 0.0) || !(board_height > 0.0)) throw InvalidArgument("board dimensions must be positive");
  if (points && *points < 2) throw InvalidArgument("--points must be at least 2");
  if (!(z_up > 0.0)) throw InvalidArgument("--z-up must be positive");
  if (!(params.dt > 0.0)) throw InvalidArgument("--dt must be positive");
  if (input == InputKind::kShape && shape != "fig8" && shape != "circle" && shape != "hover") {
    throw InvalidArgument("unknown shape '" + shape + "' (fig8, circle, hover)");
  }
  if (input != InputKind::kShape && source.empty()) throw InvalidArgument("missing input file");
  params.mpc.validate();
  params.model.validate();
}

std::vector<std::string> scenario_names() {
  return {"fig8-1000-N75", "circle-1000-N75", "cloud-1000-N20", "hi-1001-N20", "human-1582-N20"};
}

std::optional<RunSpec> scenario_preset(const std::string& name, const fs::path& data_dir) {
  RunSpec spec;
  if (name == "fig8-1000-N75") {
    spec.shape = "fig8";
    spec.points = 1000;
    spec.params.mpc.horizon = 75;
    spec.profile = VelocityProfile::kCurvature;
  } else if (name == "circle-1000-N75") {
    spec.shape = "circle";
    spec.points = 1000;
    spec.params.mpc.horizon = 75;
    spec.profile = VelocityProfile::kCurvature;
  } else if (name == "cloud-1000-N20") {
    spec.input = InputKind::kPointsCsv;
    spec.source = data_dir / "shapes" / "cloud.csv";
    spec.points = 1000;
    spec.params.mpc.horizon = 20;
    spec.profile = VelocityProfile::kCurvature;
  } else if (name == "hi-1001-N20") {
    spec.input = InputKind::kGlyph;
    spec.source = data_dir / "glyphs" / "hi.pbm";
    spec.points = 1001;
    spec.params.mpc.horizon = 20;
    spec.profile = VelocityProfile::kFiniteDiff;
  } else if (name == "human-1582-N20") {
    spec.input = InputKind::kPointsCsv;
    spec.source = data_dir / "shapes" / "human.csv";
    spec.breaks = data_dir / "shapes" / "human.breaks";
    spec.points = 1582;
    spec.params.mpc.horizon = 20;
    spec.profile = VelocityProfile::kFiniteDiff;
    spec.params.model.magnet_mode = MagnetMode::kContactGated;
  } else {
    return std::nullopt;
  }
  return spec;
}

WaypointPath build_waypoints(const RunSpec& spec) {
  spec.validate();
  WaypointPath path;
  switch (spec.input) {
    case InputKind::kShape: {
      const int n = spec.points.value_or(1000);
      if (spec.shape == "fig8") {
        path = figure8(std::max(n, 8), std::min(spec.board_width / 2.0, spec.board_height), spec.center);
        if (n < 8) path = resample_uniform(path, static_cast<std::size_t>(n));
      } else if (spec.shape == "circle") {
        path = circle(std::max(n, 3), std::min(spec.board_width, spec.board_height) / 2.0, spec.center);
        if (n < 3) path = resample_uniform(path, static_cast<std::size_t>(n));
      } else {
        path.points.assign(static_cast<std::size_t>(n), spec.center);
        path.pen.assign(path.points.size(), true);
      }
      break;
    }
    case InputKind::kPointsCsv: {
      path = load_points_csv(spec.source, spec.board_width, spec.board_height, spec.center);
      if (spec.breaks) {
        std::ifstream in(*spec.breaks);
        if (!in) throw ParseError("cannot open " + spec.breaks->string());
        path = insert_liftoff(path, read_breaks(in), spec.z_up);
      }
      if (spec.points) path = resample_uniform(path, static_cast<std::size_t>(*spec.points));
      break;
    }
    case InputKind::kGlyph: {
      path = glyph_path(read_pbm(spec.source), spec.board_width, spec.board_height, spec.center, spec.z_up);
      if (spec.points) path = resample_uniform(path, static_cast<std::size_t>(*spec.points));
      break;
    }
    case InputKind::kWaypoints: {
      std::ifstream in(spec.source);
      if (!in) throw ParseError("cannot open " + spec.source.string());
      path = read_waypoints_csv(in, spec.params.dt);
      return path;
    }
  }
  path.dt = spec.params.dt;
  if (spec.profile == VelocityProfile::kCurvature && path.size() >= 3) {
    return velocity_profile_curvature(path);
  }
  return velocity_profile_finite_diff(path);
}

CheckReport run_checks(const RunParams& params) {
  CheckReport r;
  r.equilibrium = hover_equilibrium(params.model);
  r.equilibrium_residual = equilibrium_residual(r.equilibrium.state, r.equilibrium.control, params.dt, params.model);
  r.model = linearize(r.equilibrium.state, r.equilibrium.control, params.dt, params.model);
  const Eigen::MatrixXd Q = params.mpc.state_weight().asDiagonal();
  const Eigen::MatrixXd R = params.mpc.input_weight().asDiagonal();
  const Eigen::MatrixXd K = dlqr_gain(r.model.A, r.model.B, Q, R);
  r.spectral_radius = spectral_radius(r.model.A - r.model.B * K);
  return r;
}

nlohmann::json compare_trajectory_files(const fs::path& reference, const fs::path& actual) {
  const std::vector<State> ref = read_trajectory_states(reference);
  const std::vector<State> act = read_trajectory_states(actual);
  const TrackingErrors e = tracking_errors(ref, act);
  nlohmann::json j = {
      {"mean_abs_error_m", vec3_json(e.mean_abs)},
      {"max_error_m", e.max_error},
      {"steps", act.size()},
  };
  if (act.size() > kTransientSteps) {
    const std::vector<State> ref_tail(ref.begin() + kTransientSteps, ref.end());
    const std::vector<State> act_tail(act.begin() + kTransientSteps, act.end());
    const TrackingErrors tail = tracking_errors(ref_tail, act_tail);
    j["post_transient"] = {
        {"from_step", kTransientSteps},
        {"mean_abs_error_m", vec3_json(tail.mean_abs)},
        {"max_error_m", tail.max_error},
    };
  }
  return j;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drawing-to-trajectory MPC for a magnet-carrying quadrotor", "drawmpc"};
  app.require_subcommand(1);

  Flags gen_flags, opt_flags, check_flags;
  std::string dump_model, dump_qp;
  std::string metrics_ref, metrics_actual, metrics_out;

  CLI::App* gen = app.add_subcommand("generate", "Write the waypoint CSV for a drawing");
  add_run_flags(*gen, gen_flags);
  CLI::App* opt = app.add_subcommand("optimize", "Run the MPC simulation and export the full-state trajectory");
  add_run_flags(*opt, opt_flags);
  opt->add_option("--waypoints", opt_flags.waypoints, "Waypoint CSV written by generate");
  CLI::App* check = app.add_subcommand("check", "Equilibrium and closed-loop eigenvalue report");
  add_run_flags(*check, check_flags);
  check->add_option("--dump-model", dump_model, "Write A, B, XBAR, UBAR, DT blocks");
  check->add_option("--dump-qp", dump_qp, "Write H, g, LO, HI of the hover QP");
  CLI::App* metrics = app.add_subcommand("metrics", "Tracking error between two trajectory CSVs");
  metrics->add_option("reference", metrics_ref, "Reference waypoint or full-state CSV")->required();
  metrics->add_option("actual", metrics_actual, "Full-state CSV")->required();
  metrics->add_option("--out", metrics_out, "Write JSON here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // argv[0]
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_flags, out);
    if (opt->parsed()) return cmd_optimize(opt_flags, out, err);
    if (check->parsed()) return cmd_check(check_flags, dump_model, dump_qp, out);
    if (metrics->parsed()) {
      const std::string text = compare_trajectory_files(metrics_ref, metrics_actual).dump(2) + "\n";
      if (metrics_out.empty()) {
        out << text;
      } else {
        write_text(metrics_out, text);
      }
      return kExitOk;
    }
  } catch (const EquilibriumError& e) {
    err << "error: " << e.what() << '\n';
    return kExitStabilityFailure;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitStabilityFailure;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace drawmpc
