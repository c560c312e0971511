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
// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "drawmpc/cli.hpp"
#include "drawmpc/image.hpp"
#include "drawmpc/matrix_io.hpp"
#include "drawmpc/mpc.hpp"
#include "oracles.hpp"

using namespace drawmpc;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

std::string mm(double meters) { return format_number(meters * 1e3, 4) + " mm"; }

struct ScenarioRun {
  double post_transient = 0.0;
  bool solver_failure = false;
  std::string error;
  SimResult result;
};

ScenarioRun run_scenario(const std::string& name, const fs::path& data_dir,
                         std::optional<double> magnet_force = std::nullopt) {
  ScenarioRun out;
  RunSpec spec = *scenario_preset(name, data_dir);
  if (magnet_force) spec.params.model.magnet_force = *magnet_force;
  try {
    const WaypointPath path = build_waypoints(spec);
    const CheckReport checks = run_checks(spec.params);
    out.result = run_simulation(lift_to_reference(path, spec.params.mpc.horizon), checks.model, spec.params.mpc,
                                spec.params.model);
    out.post_transient = max_error_after(out.result.errors, kTransientSteps);
  } catch (const SimulationError& e) {
    out.solver_failure = e.solver_failure();
    out.error = e.what();
    out.post_transient = INFINITY;
  } catch (const std::exception& e) {
    out.error = e.what();
    out.post_transient = INFINITY;
  }
  return out;
}

void criterion_1_2() {
  const ModelParams p;
  const Equilibrium eq = hover_equilibrium(p);
  const double residual = equilibrium_residual(eq.state, eq.control, 0.01, p);
  report(1, residual < 1e-8, "equilibrium residual " + format_number(residual, 3) + " (limit 1e-8)");

  const CheckReport r = run_checks(RunParams{});
  report(2, r.spectral_radius < 1.0, "closed-loop LQR spectral radius " + format_number(r.spectral_radius, 9));
}

void criterion_3_4_5(const fs::path& data_dir) {
  const ScenarioRun fig8 = run_scenario("fig8-1000-N75", data_dir);
  report(3, fig8.post_transient <= 5e-3,
         "fig8-1000-N75 max error after step 100 " + mm(fig8.post_transient) + " (limit 5 mm)" + fig8.error);

  bool ok = true;
  std::string detail;
  const std::pair<const char*, double> cases[] = {
      {"hi-1001-N20", 4e-3}, {"circle-1000-N75", 5e-3}, {"cloud-1000-N20", 5e-3}, {"human-1582-N20", 5e-3}};
  for (const auto& [name, limit] : cases) {
    const ScenarioRun r = run_scenario(name, data_dir);
    const bool pass = !r.solver_failure && r.error.empty() && r.post_transient <= limit;
    ok = ok && pass;
    detail += std::string(name) + " " + mm(r.post_transient) + " (limit " + mm(limit) + ")" +
              (r.error.empty() ? "" : " [" + r.error + "]") + "; ";
  }
  report(4, ok, detail);

  // Each run linearizes about its own hover point.
  const ScenarioRun off = run_scenario("fig8-1000-N75", data_dir, 0.0);
  const auto& on_u = fig8.result.controls;
  const auto& off_u = off.result.controls;
  double diff = NAN;
  if (fig8.error.empty() && off.error.empty() && on_u.size() == off_u.size() && on_u.size() > kTransientSteps) {
    double sum_on = 0.0, sum_off = 0.0;
    for (std::size_t k = kTransientSteps; k < on_u.size(); ++k) {
      sum_on += on_u[k].mean();
      sum_off += off_u[k].mean();
    }
    diff = (sum_on - sum_off) / static_cast<double>(on_u.size() - kTransientSteps);
  }
  const double expected = 2.0 / (4.0 * 0.147);
  report(5, std::abs(diff - expected) <= 0.05 * expected,
         "mean per-motor command difference " + format_number(diff, 6) + " vs " + format_number(expected, 6) +
             " +- 5%");
}

void criterion_6() {
  std::mt19937 rng(6);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> width(0.05, 2.0);
  double worst_obj = 0.0, worst_x = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng);
    const Eigen::MatrixXd H = testing::random_psd(rng, n, 0.1);
    const Eigen::VectorXd g = testing::random_vector(rng, n, 3.0);
    Eigen::VectorXd lo(n), hi(n);
    const Eigen::VectorXd mid = testing::random_vector(rng, n, 0.5);
    for (int i = 0; i < n; ++i) {
      const double w = width(rng);
      lo(i) = mid(i) - w;
      hi(i) = mid(i) + w;
    }
    const BoxQpResult r = solve_box_qp(H, g, lo, hi, 1e-10, 500);
    const auto ref = testing::enumerate_box_qp(H, g, lo, hi);
    worst_obj = std::max(worst_obj, std::abs(r.objective - ref.objective));
    worst_x = std::max(worst_x, (r.x - ref.x).norm());
  }
  report(6, worst_obj <= 1e-6 && worst_x <= 1e-5,
         "200 box QPs: worst objective gap " + format_number(worst_obj, 3) + ", worst solution gap " +
             format_number(worst_x, 3));
}

void criterion_7() {
  const ModelParams p;
  const Equilibrium eq = hover_equilibrium(p);
  const LinearModel lm = linearize(eq.state, eq.control, 0.01, p);
  auto remainder = [&](const StateVector& dx, const ControlInput& du) {
    const StateVector next = rk4_step(StateVector(lm.xbar.to_vector() + dx), lm.ubar + du, lm.dt, p);
    return (next - lm.xbar.to_vector() - lm.A * dx - lm.B * du).norm();
  };
  std::mt19937 rng(7);
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd d = testing::random_vector(rng, kStateDim + kInputDim);
    d /= d.norm();
    const StateVector dx = d.head<kStateDim>();
    const ControlInput du = d.tail<kInputDim>();
    const double ratio = remainder(1e-3 * dx, 1e-3 * du) / remainder(0.5e-3 * dx, 0.5e-3 * du);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  report(7, lo >= 3.5 && hi <= 4.5,
         "remainder ratio over 100 directions in [" + format_number(lo, 5) + ", " + format_number(hi, 5) + "]");
}

void criterion_8(const fs::path& data_dir) {
  bool ok = true;
  int glyphs = 0;
  for (const auto& entry : fs::directory_iterator(data_dir / "glyphs" / "corpus")) {
    const BinaryImage img = read_pbm(entry.path());
    const BinaryImage skel = skeletonize(img);
    ok = ok && skeletonize(skel) == skel;
    for (std::size_t i = 0; i < img.bits.size(); ++i) ok = ok && (!skel.bits[i] || img.bits[i]);
    ++glyphs;
  }
  BinaryImage rect(13, 5);
  for (int y = 1; y <= 3; ++y) {
    for (int x = 1; x <= 11; ++x) rect.set(x, y, true);
  }
  const BinaryImage skel = skeletonize(rect);
  BinaryImage expected(13, 5);
  for (int x = 2; x <= 9; ++x) expected.set(x, 2, true);
  const bool fixture = skel == expected;
  report(8, ok && glyphs == 10 && fixture,
         std::to_string(glyphs) + " corpus glyphs idempotent and subset: " + (ok ? "yes" : "no") +
             "; 11x3 rectangle thins to one row: " + (fixture ? "yes" : "no"));
}

void criterion_9() {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> count(2, 8);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Vector2d> pts(count(rng));
    for (auto& p : pts) p = Eigen::Vector2d(ud(rng), ud(rng));
    worst = std::max(worst, path_length(pts, tsp_order(pts)) / testing::brute_force_open_path(pts));
  }
  report(9, worst <= 1.05, "50 TSP instances: worst length ratio to brute force " + format_number(worst, 6));
}

void criterion_10() {
  auto vmax = [](const WaypointPath& p) {
    double m = 0.0;
    for (const auto& v : *p.velocities) m = std::max(m, v.norm());
    return m;
  };
  const WaypointPath fig8 = figure8(1000, 0.1, Eigen::Vector3d::Zero());
  const double a = vmax(velocity_profile_curvature(fig8));
  const double b = vmax(velocity_profile_finite_diff(fig8));
  const WaypointPath c = velocity_profile_curvature(circle(1000, 0.1, Eigen::Vector3d::Zero()));
  double spread = 0.0;
  for (const auto& v : *c.velocities) spread = std::max(spread, std::abs(v.norm() - kDefaultSpeedCap));
  report(10, std::abs(a - 0.01) < 1e-12 && std::abs(b - 0.01) < 1e-12 && spread <= 1e-9,
         "max speed curvature " + format_number(a, 15) + ", finite-diff " + format_number(b, 15) +
             "; circle speed spread " + format_number(spread, 3));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path data_dir = argc > 1 ? fs::path(argv[1]) : fs::path(DRAWMPC_DATA_DIR);
  criterion_1_2();
  criterion_3_4_5(data_dir);
  criterion_6();
  criterion_7();
  criterion_8(data_dir);
  criterion_9();
  criterion_10();
  std::cout << "criterion 11: NOT REPRODUCIBLE  hardware error tables need the physical vehicle, tracking system "
               "and board; covered at simulation level by criteria 3 to 5"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
