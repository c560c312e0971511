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

#include "drawmpc/trajgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "drawmpc/errors.hpp"
#include "drawmpc/matrix_io.hpp"

namespace drawmpc {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ';' || c == '\t' || c == ' ' || c == '\r') {
      if (!cur.empty()) fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) fields.push_back(std::move(cur));
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

Eigen::Vector3d chord_direction(std::span<const Eigen::Vector3d> pts, std::size_t i) {
  const std::size_t n = pts.size();
  const std::size_t lo = i == 0 ? 0 : i - 1;
  const std::size_t hi = std::min(i + 1, n - 1);
  for (const auto& d : {pts[hi] - pts[lo], pts[hi] - pts[i], pts[i] - pts[lo]}) {
    const double len = d.norm();
    if (len > 0.0) return d / len;
  }
  return Eigen::Vector3d::Zero();
}

void scale_to_cap(std::vector<Eigen::Vector3d>& vel, double v_cap) {
  double vmax = 0.0;
  for (const auto& v : vel) vmax = std::max(vmax, v.norm());
  if (vmax == 0.0) return;
  const double s = v_cap / vmax;
  for (auto& v : vel) v *= s;
}

double median_spacing(const std::vector<Eigen::Vector3d>& pts) {
  std::vector<double> d;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double len = (pts[i] - pts[i - 1]).norm();
    if (len > 0.0) d.push_back(len);
  }
  if (d.empty()) return 0.0;
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

void append_segment(std::vector<Eigen::Vector3d>& out, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                    double spacing, bool include_end) {
  const double len = (b - a).norm();
  if (len == 0.0) return;
  const int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  const int last = include_end ? steps : steps - 1;
  for (int k = 1; k <= last; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / steps));
}

}  // namespace

void WaypointPath::validate() const {
  if (points.size() < 2) throw InvalidArgument("WaypointPath: need at least 2 points");
  if (!(dt > 0.0)) throw InvalidArgument("WaypointPath: dt must be positive");
  if (pen.size() != points.size()) throw DimensionMismatch("WaypointPath: pen flags length mismatch");
  if (velocities && velocities->size() != points.size()) {
    throw DimensionMismatch("WaypointPath: velocities length mismatch");
  }
}

WaypointPath figure8(int n_points, double half_width, const Eigen::Vector3d& center) {
  if (n_points < 8) throw InvalidArgument("figure8: need at least 8 points");
  WaypointPath path;
  path.points.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n_points;
    path.points.push_back(center + Eigen::Vector3d(half_width * std::sin(t), half_width * std::sin(t) * std::cos(t), 0.0));
  }
  path.pen.assign(path.points.size(), true);
  return path;
}

WaypointPath circle(int n_points, double radius, const Eigen::Vector3d& center) {
  if (n_points < 3) throw InvalidArgument("circle: need at least 3 points");
  WaypointPath path;
  path.points.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n_points;
    path.points.push_back(center + Eigen::Vector3d(radius * std::cos(t), radius * std::sin(t), 0.0));
  }
  path.pen.assign(path.points.size(), true);
  return path;
}

std::vector<Eigen::Vector2d> read_points_csv(std::istream& in) {
  std::vector<Eigen::Vector2d> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() < 2) throw ParseError("points csv: expected two columns", line_no);
    const auto x = parse_double(fields[0]);
    const auto y = parse_double(fields[1]);
    if (!x || !y) {
      if (pts.empty() && line_no == 1) continue;  // header
      throw ParseError("points csv: non-numeric value", line_no);
    }
    pts.emplace_back(*x, *y);
  }
  if (pts.size() < 2) throw ParseError("points csv: need at least 2 rows");
  return pts;
}

WaypointPath normalize_to_board(std::span<const Eigen::Vector2d> points, double board_width, double board_height,
                                const Eigen::Vector3d& center) {
  if (points.empty()) throw InvalidArgument("normalize_to_board: no points");
  if (!(board_width > 0.0) || !(board_height > 0.0)) throw InvalidArgument("normalize_to_board: bad board size");
  Eigen::Vector2d lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector2d extent = hi - lo;
  if (extent.maxCoeff() <= 0.0) throw InvalidArgument("normalize_to_board: degenerate point set (all identical)");
  double scale = std::numeric_limits<double>::infinity();
  if (extent.x() > 0.0) scale = std::min(scale, board_width / extent.x());
  if (extent.y() > 0.0) scale = std::min(scale, board_height / extent.y());
  const Eigen::Vector2d mid = 0.5 * (lo + hi);

  WaypointPath path;
  path.points.reserve(points.size());
  for (const auto& p : points) {
    const Eigen::Vector2d q = (p - mid) * scale;
    path.points.push_back(center + Eigen::Vector3d(q.x(), q.y(), 0.0));
  }
  path.pen.assign(path.points.size(), true);
  return path;
}

WaypointPath load_points_csv(const std::filesystem::path& path, double board_width, double board_height,
                             const Eigen::Vector3d& center) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  const auto pts = read_points_csv(in);
  return normalize_to_board(pts, board_width, board_height, center);
}

double path_length(std::span<const Eigen::Vector2d> points, std::span<const std::size_t> order) {
  double len = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) len += (points[order[k]] - points[order[k - 1]]).norm();
  return len;
}

namespace {

std::vector<std::size_t> nearest_neighbour_order(std::span<const Eigen::Vector2d> points, std::size_t start) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<bool> used(n, false);
  order.push_back(start);
  used[start] = true;
  for (std::size_t k = 1; k < n; ++k) {
    const auto& cur = points[order.back()];
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double d = (points[i] - cur).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    order.push_back(best);
  }

  return order;
}

// Alternates 2-opt and Or-opt until neither finds an improving move.
void improve_open_path(std::span<const Eigen::Vector2d> points, std::vector<std::size_t>& order) {
  const std::size_t n = points.size();
  if (n < 3) return;
  const auto d = [&](std::size_t a, std::size_t b) { return (points[a] - points[b]).norm(); };

  // 2-opt on an open path: reversing order[i..j] swaps edges (i-1, i) and
  // (j, j+1) for (i-1, j) and (i, j+1); missing end edges cost nothing.
  const auto two_opt = [&]() {
    bool any = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        double delta = 0.0;
        if (i > 0) delta += d(order[i - 1], order[j]) - d(order[i - 1], order[i]);
        if (j + 1 < n) delta += d(order[i], order[j + 1]) - d(order[j], order[j + 1]);
        if (delta < -1e-12) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          any = true;
        }
      }
    }
    return any;
  };

  // Or-opt: move a run order[i..i+len) between order[k-1] and order[k]
  // (k outside the run), optionally reversed.
  const auto or_opt = [&]() {
    for (std::size_t len = 1; len <= 3 && len < n; ++len) {
      for (std::size_t i = 0; i + len <= n; ++i) {
        const std::size_t first = order[i], last = order[i + len - 1];
        double removed = 0.0;
        if (i > 0) removed += d(order[i - 1], first);
        if (i + len < n) removed += d(last, order[i + len]);
        if (i > 0 && i + len < n) removed -= d(order[i - 1], order[i + len]);
        for (std::size_t k = 0; k <= n; ++k) {
          if (k >= i && k <= i + len) continue;
          const bool has_prev = k > 0, has_next = k < n;
          const std::size_t prev = has_prev ? order[k - 1] : 0, next = has_next ? order[k] : 0;
          const double gap = has_prev && has_next ? d(prev, next) : 0.0;
          for (int rev = 0; rev < 2; ++rev) {
            const std::size_t head = rev ? last : first, tail = rev ? first : last;
            double added = -gap;
            if (has_prev) added += d(prev, head);
            if (has_next) added += d(tail, next);
            if (added - removed < -1e-12) {
              std::vector<std::size_t> run(order.begin() + static_cast<std::ptrdiff_t>(i),
                                           order.begin() + static_cast<std::ptrdiff_t>(i + len));
              if (rev) std::reverse(run.begin(), run.end());
              std::vector<std::size_t> next_order;
              next_order.reserve(n);
              for (std::size_t m = 0; m <= n; ++m) {
                if (m == k) next_order.insert(next_order.end(), run.begin(), run.end());
                if (m < n && (m < i || m >= i + len)) next_order.push_back(order[m]);
              }
              order = std::move(next_order);
              return true;
            }
          }
        }
      }
    }
    return false;
  };

  while (two_opt() || or_opt()) {
  }
}

}  // namespace

std::vector<std::size_t> tsp_order(std::span<const Eigen::Vector2d> points) {
  const std::size_t n = points.size();
  if (n == 0) throw InvalidArgument("tsp_order: need at least one point");

  std::size_t leftmost = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const auto& p = points[i];
    const auto& s = points[leftmost];
    if (p.x() < s.x() || (p.x() == s.x() && p.y() < s.y())) leftmost = i;
  }

  // Nearest-neighbour seeds from the leftmost point plus evenly spaced
  // others; the shortest locally optimal path wins.
  const std::size_t seeds = std::min<std::size_t>(n, kTspSeeds);
  std::vector<std::size_t> best;
  double best_len = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::size_t start = s == 0 ? leftmost : (leftmost + s * n / seeds) % n;
    std::vector<std::size_t> order = nearest_neighbour_order(points, start);
    improve_open_path(points, order);
    const double len = path_length(points, order);
    if (len < best_len - 1e-12) {
      best_len = len;
      best = std::move(order);
    }
  }
  return best;
}

double menger_curvature(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
  const double denom = ab * bc * ca;
  if (denom == 0.0) return 0.0;
  const double area2 = (b - a).cross(c - a).norm();  // twice the triangle area
  return 2.0 * area2 / denom;
}

WaypointPath velocity_profile_curvature(const WaypointPath& path, double v_cap, double straight_boost) {
  if (path.size() < 3) throw InvalidArgument("velocity_profile_curvature: need at least 3 points");
  const auto& p = path.points;
  const std::size_t n = p.size();
  std::vector<Eigen::Vector3d> vel(n, Eigen::Vector3d::Zero());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool degenerate = p[i] == p[i - 1] || p[i] == p[i + 1] || p[i - 1] == p[i + 1];
    const double kappa = degenerate ? kCurvatureFloor : menger_curvature(p[i - 1], p[i], p[i + 1]);
    double speed = 1.0 / (kappa + kCurvatureFloor);
    if (kappa < kStraightCurvature) speed *= straight_boost;
    vel[i] = speed * chord_direction(p, i);
  }
  vel[0] = vel[1];
  vel[n - 1] = vel[n - 2];
  scale_to_cap(vel, v_cap);
  WaypointPath out = path;
  out.velocities = std::move(vel);
  return out;
}

WaypointPath velocity_profile_finite_diff(const WaypointPath& path, double v_cap) {
  if (path.size() < 2) throw InvalidArgument("velocity_profile_finite_diff: need at least 2 points");
  const auto& p = path.points;
  const std::size_t n = p.size();
  std::vector<Eigen::Vector3d> vel(n);
  vel[0] = (p[1] - p[0]) / path.dt;
  vel[n - 1] = (p[n - 1] - p[n - 2]) / path.dt;
  for (std::size_t i = 1; i + 1 < n; ++i) vel[i] = (p[i + 1] - p[i - 1]) / (2.0 * path.dt);
  scale_to_cap(vel, v_cap);
  WaypointPath out = path;
  out.velocities = std::move(vel);
  return out;
}

WaypointPath insert_liftoff(const WaypointPath& path, std::span<const SegmentBreak> breaks, double z_up) {
  if (breaks.empty()) return path;
  path.validate();
  if (!(z_up > 0.0)) throw InvalidArgument("insert_liftoff: z_up must be positive");
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    const auto [i, j] = breaks[k];
    if (i >= j || j >= path.size()) throw InvalidArgument("insert_liftoff: invalid break indices");
    if (k > 0 && i < breaks[k - 1].second) throw InvalidArgument("insert_liftoff: overlapping breaks");
  }

  const double spacing = std::max(median_spacing(path.points), 1e-6);
  WaypointPath out;
  out.dt = path.dt;
  std::size_t next = 0;
  for (const auto& [i, j] : breaks) {
    for (; next <= i; ++next) {
      out.points.push_back(path.points[next]);
      out.pen.push_back(path.pen[next]);
    }
    const Eigen::Vector3d a = path.points[i], b = path.points[j];
    const Eigen::Vector3d a_up(a.x(), a.y(), a.z() + z_up), b_up(b.x(), b.y(), b.z() + z_up);
    std::vector<Eigen::Vector3d> arc;
    append_segment(arc, a, a_up, spacing, true);
    append_segment(arc, a_up, b_up, spacing, true);
    append_segment(arc, b_up, b, spacing, false);
    for (const auto& q : arc) {
      out.points.push_back(q);
      out.pen.push_back(false);
    }
    next = j;
  }
  for (; next < path.size(); ++next) {
    out.points.push_back(path.points[next]);
    out.pen.push_back(path.pen[next]);
  }
  return out;
}

WaypointPath resample_uniform(const WaypointPath& path, std::size_t n) {
  path.validate();
  if (n < 2) throw InvalidArgument("resample_uniform: need at least 2 samples");
  const auto& p = path.points;
  std::vector<double> s(p.size(), 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) s[i] = s[i - 1] + (p[i] - p[i - 1]).norm();
  const double total = s.back();
  if (!(total > 0.0)) throw InvalidArgument("resample_uniform: zero-length path");

  WaypointPath out;
  out.dt = path.dt;
  out.points.reserve(n);
  out.pen.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = k + 1 == n ? total : total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 2 < p.size() && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double frac = len > 0.0 ? std::clamp((target - s[seg]) / len, 0.0, 1.0) : 0.0;
    out.points.push_back(p[seg] + frac * (p[seg + 1] - p[seg]));
    bool pen;
    if (frac == 0.0) {
      pen = path.pen[seg];
    } else if (frac == 1.0) {
      pen = path.pen[seg + 1];
    } else {
      pen = path.pen[seg] && path.pen[seg + 1];
    }
    out.pen.push_back(pen);
  }
  return out;
}

WaypointPath glyph_path(const BinaryImage& glyph, double board_width, double board_height,
                        const Eigen::Vector3d& center, double z_up, double jump_pixels) {
  const BinaryImage skel = skeletonize(glyph);
  std::vector<Eigen::Vector2d> pixels;
  for (int y = 0; y < skel.height; ++y) {
    for (int x = 0; x < skel.width; ++x) {
      if (skel.at(x, y)) pixels.emplace_back(x, skel.height - 1 - y);  // image rows grow downward
    }
  }
  if (pixels.size() < 2) throw InvalidArgument("glyph_path: skeleton has fewer than 2 pixels");

  const auto order = tsp_order(pixels);
  std::vector<Eigen::Vector2d> ordered;
  ordered.reserve(order.size());
  for (std::size_t idx : order) ordered.push_back(pixels[idx]);

  std::vector<SegmentBreak> breaks;
  for (std::size_t k = 1; k < ordered.size(); ++k) {
    if ((ordered[k] - ordered[k - 1]).norm() > jump_pixels) breaks.emplace_back(k - 1, k);
  }
  return insert_liftoff(normalize_to_board(ordered, board_width, board_height, center), breaks, z_up);
}

ReferenceTrajectory lift_to_reference(const WaypointPath& path, int horizon) {
  path.validate();
  if (!path.velocities) throw InvalidArgument("lift_to_reference: path has no velocities");
  if (horizon < 0) throw InvalidArgument("lift_to_reference: negative horizon");
  ReferenceTrajectory ref;
  ref.dt = path.dt;
  ref.states.reserve(path.size() + static_cast<std::size_t>(horizon));
  for (std::size_t i = 0; i < path.size(); ++i) {
    State s;
    s.r = path.points[i];
    s.v = (*path.velocities)[i];
    ref.states.push_back(s);
  }
  const State terminal = ref.states.back();
  for (int k = 0; k < horizon; ++k) ref.states.push_back(terminal);
  ref.padding = static_cast<std::size_t>(horizon);
  return ref;
}

void write_waypoints_csv(std::ostream& out, const WaypointPath& path) {
  path.validate();
  out << "x,y,z,vx,vy,vz,pen\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Eigen::Vector3d& p = path.points[i];
    const Eigen::Vector3d v = path.velocities ? (*path.velocities)[i] : Eigen::Vector3d::Zero();
    out << format_number(p.x(), 9) << ',' << format_number(p.y(), 9) << ',' << format_number(p.z(), 9) << ','
        << format_number(v.x(), 9) << ',' << format_number(v.y(), 9) << ',' << format_number(v.z(), 9) << ','
        << (path.pen[i] ? 1 : 0) << '\n';
  }
}

WaypointPath read_waypoints_csv(std::istream& in, double dt) {
  WaypointPath path;
  path.dt = dt;
  std::vector<Eigen::Vector3d> vel;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (line_no == 1 && !fields.empty() && !parse_double(fields[0])) continue;
    if (fields.size() != 7) throw ParseError("waypoint csv: expected 7 columns", line_no);
    double v[7];
    for (int k = 0; k < 7; ++k) {
      const auto d = parse_double(fields[static_cast<std::size_t>(k)]);
      if (!d) throw ParseError("waypoint csv: non-numeric value", line_no);
      v[k] = *d;
    }
    path.points.emplace_back(v[0], v[1], v[2]);
    vel.emplace_back(v[3], v[4], v[5]);
    path.pen.push_back(v[6] != 0.0);
  }
  path.velocities = std::move(vel);
  path.validate();
  return path;
}

std::vector<SegmentBreak> read_breaks(std::istream& in) {
  std::vector<SegmentBreak> breaks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (blank(line)) continue;
    std::istringstream ss(line);
    long long i = -1, j = -1;
    if (!(ss >> i >> j) || i < 0 || j < 0) throw ParseError("breaks: expected two non-negative indices", line_no);
    breaks.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return breaks;
}

}  // namespace drawmpc
