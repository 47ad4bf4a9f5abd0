#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcnav/log_csv.hpp"
#include "rcnav/scenario.hpp"
#include "rcnav/sim.hpp"

namespace rcnav {

namespace svg {

inline std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

/// Axis-aligned data window plus the pixel frame it maps onto.
struct Frame {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  double px = 60.0, py = 20.0;          // top-left of the plot area
  double pw = 520.0, ph = 420.0;        // plot area size in pixels
  double width = 640.0, height = 500.0; // full canvas

  double sx(double x) const { return px + (x - x_min) / (x_max - x_min) * pw; }
  double sy(double y) const { return py + (y_max - y) / (y_max - y_min) * ph; }
};

inline void expand(double& lo, double& hi, double pad_fraction = 0.05) {
  if (!(hi > lo)) {
    hi = lo + 1.0;
    lo -= 1.0;
  }
  const double pad = (hi - lo) * pad_fraction;
  lo -= pad;
  hi += pad;
}

inline std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  const double raw = span / std::max(target, 2);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  }
  return out;
}

class Canvas {
 public:
  explicit Canvas(const Frame& frame) : frame_(frame) {}

  void polyline(const std::vector<Vec2>& pts, const std::string& style) {
    body_ << "<polyline fill=\"none\" " << style << " points=\"";
    for (const Vec2& p : pts) {
      body_ << num(frame_.sx(p.x())) << "," << num(frame_.sy(p.y())) << " ";
    }
    body_ << "\"/>\n";
  }

  void polygon(const std::vector<Vec2>& pts, const std::string& style) {
    body_ << "<polygon " << style << " points=\"";
    for (const Vec2& p : pts) {
      body_ << num(frame_.sx(p.x())) << "," << num(frame_.sy(p.y())) << " ";
    }
    body_ << "\"/>\n";
  }

  void circle(const Vec2& center, double world_radius, const std::string& style) {
    const double r = world_radius / (frame_.x_max - frame_.x_min) * frame_.pw;
    body_ << "<circle cx=\"" << num(frame_.sx(center.x())) << "\" cy=\""
          << num(frame_.sy(center.y())) << "\" r=\"" << num(r) << "\" " << style << "/>\n";
  }

  void dot(const Vec2& center, double pixel_radius, const std::string& style) {
    body_ << "<circle cx=\"" << num(frame_.sx(center.x())) << "\" cy=\""
          << num(frame_.sy(center.y())) << "\" r=\"" << num(pixel_radius) << "\" " << style
          << "/>\n";
  }

  void hline(double y, const std::string& style) {
    body_ << "<line x1=\"" << num(frame_.px) << "\" y1=\"" << num(frame_.sy(y)) << "\" x2=\""
          << num(frame_.px + frame_.pw) << "\" y2=\"" << num(frame_.sy(y)) << "\" " << style
          << "/>\n";
  }

  void text(double px, double py, const std::string& content, const std::string& style) {
    body_ << "<text x=\"" << num(px) << "\" y=\"" << num(py) << "\" " << style << ">"
          << escape(content) << "</text>\n";
  }

  void axes(const std::string& x_label, const std::string& y_label) {
    const Frame& f = frame_;
    body_ << "<rect x=\"" << num(f.px) << "\" y=\"" << num(f.py) << "\" width=\"" << num(f.pw)
          << "\" height=\"" << num(f.ph)
          << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    for (double v : ticks(f.x_min, f.x_max)) {
      const double x = f.sx(v);
      body_ << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.py + f.ph) << "\" x2=\"" << num(x)
            << "\" y2=\"" << num(f.py + f.ph + 4) << "\" stroke=\"#444\"/>\n";
      text(x - 10, f.py + f.ph + 16, num(v), "font-size=\"10\" fill=\"#333\"");
    }
    for (double v : ticks(f.y_min, f.y_max)) {
      const double y = f.sy(v);
      body_ << "<line x1=\"" << num(f.px - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(f.px)
            << "\" y2=\"" << num(y) << "\" stroke=\"#444\"/>\n";
      text(f.px - 38, y + 3, num(v), "font-size=\"10\" fill=\"#333\"");
    }
    text(f.px + f.pw / 2 - 10, f.height - 8, x_label, "font-size=\"12\" fill=\"#222\"");
    body_ << "<text x=\"14\" y=\"" << num(f.py + f.ph / 2)
          << "\" font-size=\"12\" fill=\"#222\" transform=\"rotate(-90 14 "
          << num(f.py + f.ph / 2) << ")\">" << escape(y_label) << "</text>\n";
  }

  void render(std::ostream& os) const {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(frame_.width)
       << "\" height=\"" << num(frame_.height) << "\" viewBox=\"0 0 " << num(frame_.width) << " "
       << num(frame_.height) << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_.str() << "</svg>\n";
  }

 private:
  Frame frame_;
  std::ostringstream body_;
};

inline std::vector<Vec2> primitive_outline(const Primitive& prim, const Pose2& pose) {
  std::vector<Vec2> pts;
  if (prim.kind == Primitive::Kind::Rectangle) {
    for (const Vec2& corner :
         {Vec2(prim.half_length, prim.half_width), Vec2(-prim.half_length, prim.half_width),
          Vec2(-prim.half_length, -prim.half_width), Vec2(prim.half_length, -prim.half_width)}) {
      pts.push_back(body_to_world(pose, prim.offset + corner));
    }
  } else {
    for (int k = 0; k < 40; ++k) {
      const double a = 2.0 * M_PI * k / 40.0;
      pts.push_back(body_to_world(
          pose, prim.offset + prim.radius * Vec2(std::cos(a), std::sin(a))));
    }
  }
  return pts;
}

inline std::vector<Vec2> obstacle_outline(const ObstacleShape& shape, const Vec2& position) {
  std::vector<Vec2> pts;
  if (shape.kind == ObstacleShape::Kind::Circle) {
    for (int k = 0; k < 40; ++k) {
      const double a = 2.0 * M_PI * k / 40.0;
      pts.push_back(position + shape.radius * Vec2(std::cos(a), std::sin(a)));
    }
  } else {
    for (const Vec2& v : shape.vertices) {
      pts.push_back(position + v);
    }
  }
  return pts;
}

inline const char* series_color(std::size_t index) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf"};
  return palette[index % (sizeof(palette) / sizeof(palette[0]))];
}

/// Obstacle positions replayed with the same Euler stepping the simulator
/// uses, one snapshot per record.
inline std::vector<std::vector<Vec2>> replay_obstacle_positions(const ScenarioConfig& cfg,
                                                                std::size_t record_count) {
  std::vector<ObstacleState> states;
  for (const ObstacleConfig& o : cfg.obstacles) {
    states.push_back({o.position, o.velocity, o.acceleration});
  }
  std::vector<std::vector<Vec2>> out(cfg.obstacles.size());
  for (std::size_t k = 0; k < record_count; ++k) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      out[i].push_back(states[i].position);
      states[i] = step_obstacle(states[i], cfg.sim.dt);
    }
  }
  return out;
}

}  // namespace svg

/// Fig.-style overhead view: robot outline snapshots along the path, the
/// path polyline, obstacle outlines with their travel paths, goal marker.
inline void plot_trajectory(const std::vector<StepRecord>& records, const ScenarioConfig& cfg,
                            std::ostream& os) {
  if (records.empty()) {
    throw std::invalid_argument("plot_trajectory: no records");
  }
  const auto obstacle_paths = svg::replay_obstacle_positions(cfg, records.size());

  double shape_reach = 0.0;
  const RobotShape shape = cfg.make_shape();
  const Aabb box = shape.bounding_box();
  shape_reach = std::max({std::abs(box.lo.x()), std::abs(box.lo.y()), std::abs(box.hi.x()),
                          std::abs(box.hi.y())});

  svg::Frame frame;
  frame.x_min = frame.y_min = std::numeric_limits<double>::infinity();
  frame.x_max = frame.y_max = -std::numeric_limits<double>::infinity();
  auto include = [&frame](const Vec2& p, double pad) {
    frame.x_min = std::min(frame.x_min, p.x() - pad);
    frame.x_max = std::max(frame.x_max, p.x() + pad);
    frame.y_min = std::min(frame.y_min, p.y() - pad);
    frame.y_max = std::max(frame.y_max, p.y() + pad);
  };
  for (const StepRecord& r : records) {
    include({r.x, r.y}, shape_reach);
  }
  include(cfg.robot.goal.position(), 0.5);
  for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
    double reach = 0.0;
    if (cfg.obstacles[i].shape.kind == ObstacleShape::Kind::Circle) {
      reach = cfg.obstacles[i].shape.radius;
    } else {
      for (const Vec2& v : cfg.obstacles[i].shape.vertices) {
        reach = std::max(reach, v.norm());
      }
    }
    for (const Vec2& p : obstacle_paths[i]) {
      include(p, reach);
    }
  }
  svg::expand(frame.x_min, frame.x_max);
  svg::expand(frame.y_min, frame.y_max);

  // Equal aspect: widen the shorter world axis.
  {
    const double span_x = frame.x_max - frame.x_min;
    const double span_y = frame.y_max - frame.y_min;
    const double aspect = frame.pw / frame.ph;
    if (span_x / span_y < aspect) {
      const double grow = (span_y * aspect - span_x) / 2.0;
      frame.x_min -= grow;
      frame.x_max += grow;
    } else {
      const double grow = (span_x / aspect - span_y) / 2.0;
      frame.y_min -= grow;
      frame.y_max += grow;
    }
  }

  svg::Canvas canvas(frame);
  canvas.axes("x [m]", "y [m]");

  // Obstacle travel paths and outlines at the first and last records.
  for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
    const ObstacleConfig& oc = cfg.obstacles[i];
    if (obstacle_paths[i].size() > 1) {
      canvas.polyline(obstacle_paths[i],
                      "stroke=\"#111\" stroke-width=\"1\" stroke-dasharray=\"5,3\"");
    }
    canvas.polygon(svg::obstacle_outline(oc.shape, obstacle_paths[i].front()),
                   "fill=\"#222\" fill-opacity=\"0.25\" stroke=\"#111\"");
    canvas.polygon(svg::obstacle_outline(oc.shape, obstacle_paths[i].back()),
                   "fill=\"#222\" fill-opacity=\"0.6\" stroke=\"#111\"");
  }

  // Robot snapshots (grey) plus the final footprint (blue).
  const std::size_t snapshots = 7;
  const std::size_t stride = std::max<std::size_t>(1, records.size() / snapshots);
  for (std::size_t k = 0; k < records.size(); k += stride) {
    const Pose2 pose{{records[k].x, records[k].y}, records[k].theta};
    for (const Primitive& prim : shape.primitives) {
      canvas.polygon(svg::primitive_outline(prim, pose),
                     "fill=\"none\" stroke=\"#999\" stroke-width=\"1\"");
    }
  }
  const Pose2 final_pose{{records.back().x, records.back().y}, records.back().theta};
  for (const Primitive& prim : shape.primitives) {
    canvas.polygon(svg::primitive_outline(prim, final_pose),
                   "fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"#1f77b4\"");
  }

  std::vector<Vec2> path;
  for (const StepRecord& r : records) {
    path.push_back({r.x, r.y});
  }
  canvas.polyline(path, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");
  canvas.dot(cfg.robot.goal.position(), 6, "fill=\"#c0c0c0\" stroke=\"#555\" stroke-width=\"1.5\"");

  canvas.text(frame.px, 14, cfg.name.empty() ? "trajectory" : cfg.name + " - trajectory",
              "font-size=\"13\" fill=\"#111\"");
  canvas.render(os);
}

/// Per-obstacle minimum barrier value against time, with the h = 0 line.
/// Values are recomputed from the logged poses and the replayed obstacle
/// motion, so each obstacle gets its own curve.
inline void plot_cbf(const std::vector<StepRecord>& records, const ScenarioConfig& cfg,
                     std::ostream& os) {
  if (records.empty()) {
    throw std::invalid_argument("plot_cbf: no records");
  }
  const SdfField field = cfg.make_field();
  std::vector<Obstacle> obstacles = cfg.make_obstacles();

  std::vector<std::vector<Vec2>> series(obstacles.size());
  double h_min = 0.0;
  double h_max = 1.0;
  for (const StepRecord& r : records) {
    const Pose2 pose{{r.x, r.y}, r.theta};
    const BarrierSummary summary = min_barrier(field, pose, obstacles);
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      series[i].push_back({r.t, summary.per_obstacle[i]});
      h_min = std::min(h_min, summary.per_obstacle[i]);
      h_max = std::max(h_max, summary.per_obstacle[i]);
    }
    for (Obstacle& o : obstacles) {
      o.state = step_obstacle(o.state, cfg.sim.dt);
    }
  }

  svg::Frame frame;
  frame.x_min = records.front().t;
  frame.x_max = records.back().t;
  frame.y_min = h_min;
  frame.y_max = h_max;
  svg::expand(frame.x_min, frame.x_max, 0.02);
  svg::expand(frame.y_min, frame.y_max);

  svg::Canvas canvas(frame);
  canvas.axes("t [s]", "min h [m]");
  canvas.hline(0.0, "stroke=\"#000\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
  for (std::size_t i = 0; i < series.size(); ++i) {
    canvas.polyline(series[i], std::string("stroke=\"") + svg::series_color(i) +
                                   "\" stroke-width=\"1.5\"");
    canvas.text(frame.px + frame.pw - 110, frame.py + 16 + 14 * static_cast<double>(i),
                "obstacle " + std::to_string(i),
                std::string("font-size=\"11\" fill=\"") + svg::series_color(i) + "\"");
  }
  canvas.text(frame.px, 14, cfg.name.empty() ? "barrier values" : cfg.name + " - barrier values",
              "font-size=\"13\" fill=\"#111\"");
  canvas.render(os);
}

/// Control inputs against time with the bound lines.
inline void plot_controls(const std::vector<StepRecord>& records, std::ostream& os,
                          const ScenarioConfig* cfg = nullptr) {
  if (records.empty()) {
    throw std::invalid_argument("plot_controls: no records");
  }
  svg::Frame frame;
  frame.x_min = records.front().t;
  frame.x_max = records.back().t;
  frame.y_min = std::numeric_limits<double>::infinity();
  frame.y_max = -std::numeric_limits<double>::infinity();

  std::vector<Vec2> u1, u2;
  for (const StepRecord& r : records) {
    u1.push_back({r.t, r.u.x()});
    u2.push_back({r.t, r.u.y()});
    frame.y_min = std::min({frame.y_min, r.u.x(), r.u.y()});
    frame.y_max = std::max({frame.y_max, r.u.x(), r.u.y()});
  }
  const char* label1 = "u1";
  const char* label2 = "u2";
  if (cfg != nullptr) {
    frame.y_min = std::min({frame.y_min, cfg->robot.bounds.lo.x(), cfg->robot.bounds.lo.y()});
    frame.y_max = std::max({frame.y_max, cfg->robot.bounds.hi.x(), cfg->robot.bounds.hi.y()});
    if (cfg->robot.model == RobotModel::Unicycle) {
      label1 = "v [m/s]";
      label2 = "omega [rad/s]";
    } else {
      label1 = "v_x [m/s]";
      label2 = "v_y [m/s]";
    }
  }
  svg::expand(frame.x_min, frame.x_max, 0.02);
  svg::expand(frame.y_min, frame.y_max);

  svg::Canvas canvas(frame);
  canvas.axes("t [s]", "control");
  if (cfg != nullptr) {
    for (double b : {cfg->robot.bounds.lo.x(), cfg->robot.bounds.lo.y(),
                     cfg->robot.bounds.hi.x(), cfg->robot.bounds.hi.y()}) {
      canvas.hline(b, "stroke=\"#000\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
    }
  }
  canvas.polyline(u1, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");
  canvas.polyline(u2, "stroke=\"#d62728\" stroke-width=\"1.5\"");
  canvas.text(frame.px + frame.pw - 110, frame.py + 16, label1,
              "font-size=\"11\" fill=\"#1f77b4\"");
  canvas.text(frame.px + frame.pw - 110, frame.py + 30, label2,
              "font-size=\"11\" fill=\"#d62728\"");
  canvas.text(frame.px, 14, "control inputs", "font-size=\"13\" fill=\"#111\"");
  canvas.render(os);
}

}  // namespace rcnav
