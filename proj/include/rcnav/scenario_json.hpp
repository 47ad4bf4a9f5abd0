#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcnav/scenario.hpp"

namespace rcnav {

namespace detail {

using Json = nlohmann::json;

inline void reject_unknown_keys(const Json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ScenarioError(path + ": unknown key '" + item.key() + "'");
    }
  }
}

inline const Json& require(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ScenarioError(path + ": missing key '" + key + "'");
  }
  return *it;
}

inline double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) {
    throw ScenarioError(path + ": expected a number");
  }
  return j.get<double>();
}

inline int as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw ScenarioError(path + ": expected an integer");
  }
  return j.get<int>();
}

inline std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) {
    throw ScenarioError(path + ": expected a string");
  }
  return j.get<std::string>();
}

inline Vec2 as_vec2(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    throw ScenarioError(path + ": expected [x, y]");
  }
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

inline double number_or(const Json& obj, const std::string& path, const char* key,
                        double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, path + "." + key);
}

inline Primitive parse_primitive(const Json& j, const std::string& path) {
  if (!j.is_object()) {
    throw ScenarioError(path + ": expected an object");
  }
  const std::string type = as_string(require(j, path, "type"), path + ".type");
  const Vec2 offset = j.contains("offset") ? as_vec2(j["offset"], path + ".offset")
                                           : Vec2::Zero();
  if (type == "circle") {
    reject_unknown_keys(j, path, {"type", "radius", "offset"});
    return Primitive::circle(as_number(require(j, path, "radius"), path + ".radius"), offset);
  }
  if (type == "rectangle") {
    reject_unknown_keys(j, path, {"type", "half_length", "half_width", "offset"});
    return Primitive::rectangle(
        as_number(require(j, path, "half_length"), path + ".half_length"),
        as_number(require(j, path, "half_width"), path + ".half_width"), offset);
  }
  throw ScenarioError(path + ".type: unknown primitive '" + type + "'");
}

inline ObstacleShape parse_obstacle_shape(const Json& j, const std::string& path) {
  if (!j.is_object()) {
    throw ScenarioError(path + ": expected an object");
  }
  const std::string type = as_string(require(j, path, "type"), path + ".type");
  if (type == "circle") {
    reject_unknown_keys(j, path, {"type", "radius"});
    return ObstacleShape::circle(as_number(require(j, path, "radius"), path + ".radius"));
  }
  if (type == "rectangle") {
    reject_unknown_keys(j, path, {"type", "half_length", "half_width"});
    return ObstacleShape::rectangle(
        as_number(require(j, path, "half_length"), path + ".half_length"),
        as_number(require(j, path, "half_width"), path + ".half_width"));
  }
  if (type == "polygon") {
    reject_unknown_keys(j, path, {"type", "vertices"});
    const Json& verts = require(j, path, "vertices");
    if (!verts.is_array() || verts.size() < 3) {
      throw ScenarioError(path + ".vertices: expected at least 3 [x, y] pairs");
    }
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      out.push_back(as_vec2(verts[i], path + ".vertices[" + std::to_string(i) + "]"));
    }
    return ObstacleShape::polygon(std::move(out));
  }
  throw ScenarioError(path + ".type: unknown obstacle shape '" + type + "'");
}

}  // namespace detail

/// Parse and validate a scenario document. Unknown keys are rejected;
/// omitted optional keys take the documented defaults. Input bounds default
/// to |v_x|, |v_y| <= 2 for the single integrator and |v| <= 2, |omega| <= 1
/// for the unicycle.
inline ScenarioConfig parse_scenario(const std::string& text) {
  using detail::Json;
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  if (!root.is_object()) {
    throw ScenarioError("scenario: top level must be an object");
  }
  detail::reject_unknown_keys(
      root, "scenario", {"name", "notes", "robot", "obstacles", "controller", "sim", "outputs"});

  ScenarioConfig cfg;
  if (root.contains("name")) {
    cfg.name = detail::as_string(root["name"], "scenario.name");
  }
  if (root.contains("notes")) {
    detail::as_string(root["notes"], "scenario.notes");  // documentation only
  }

  const Json& robot = detail::require(root, "scenario", "robot");
  if (!robot.is_object()) {
    throw ScenarioError("scenario.robot: expected an object");
  }
  detail::reject_unknown_keys(
      robot, "scenario.robot",
      {"model", "shape", "start", "theta0", "goal", "goal_theta", "bounds"});

  const std::string model =
      detail::as_string(detail::require(robot, "scenario.robot", "model"), "scenario.robot.model");
  if (model == "single_integrator") {
    cfg.robot.model = RobotModel::SingleIntegrator;
  } else if (model == "unicycle") {
    cfg.robot.model = RobotModel::Unicycle;
  } else {
    throw ScenarioError("scenario.robot.model: expected 'single_integrator' or 'unicycle'");
  }

  const Json& shape = detail::require(robot, "scenario.robot", "shape");
  if (!shape.is_array() || shape.empty()) {
    throw ScenarioError("scenario.robot.shape: expected a non-empty array of primitives");
  }
  for (std::size_t i = 0; i < shape.size(); ++i) {
    cfg.robot.shape.push_back(
        detail::parse_primitive(shape[i], "scenario.robot.shape[" + std::to_string(i) + "]"));
  }

  const Vec2 start =
      detail::as_vec2(detail::require(robot, "scenario.robot", "start"), "scenario.robot.start");
  cfg.robot.x0 = start.x();
  cfg.robot.y0 = start.y();
  cfg.robot.theta0 = detail::number_or(robot, "scenario.robot", "theta0", 0.0);

  const Vec2 goal =
      detail::as_vec2(detail::require(robot, "scenario.robot", "goal"), "scenario.robot.goal");
  cfg.robot.goal.x = goal.x();
  cfg.robot.goal.y = goal.y();
  cfg.robot.goal.theta = detail::number_or(robot, "scenario.robot", "goal_theta", 0.0);

  if (cfg.robot.model == RobotModel::SingleIntegrator) {
    cfg.robot.bounds.lo = Vec2(-2.0, -2.0);
    cfg.robot.bounds.hi = Vec2(2.0, 2.0);
  } else {
    cfg.robot.bounds.lo = Vec2(-2.0, -1.0);
    cfg.robot.bounds.hi = Vec2(2.0, 1.0);
  }
  if (robot.contains("bounds")) {
    const Json& bounds = robot["bounds"];
    if (!bounds.is_object()) {
      throw ScenarioError("scenario.robot.bounds: expected an object");
    }
    detail::reject_unknown_keys(bounds, "scenario.robot.bounds", {"min", "max"});
    cfg.robot.bounds.lo = detail::as_vec2(detail::require(bounds, "scenario.robot.bounds", "min"),
                                          "scenario.robot.bounds.min");
    cfg.robot.bounds.hi = detail::as_vec2(detail::require(bounds, "scenario.robot.bounds", "max"),
                                          "scenario.robot.bounds.max");
  }

  if (root.contains("obstacles")) {
    const Json& obstacles = root["obstacles"];
    if (!obstacles.is_array()) {
      throw ScenarioError("scenario.obstacles: expected an array");
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const std::string path = "scenario.obstacles[" + std::to_string(i) + "]";
      const Json& item = obstacles[i];
      if (!item.is_object()) {
        throw ScenarioError(path + ": expected an object");
      }
      detail::reject_unknown_keys(
          item, path, {"shape", "position", "velocity", "acceleration", "points", "notes"});
      ObstacleConfig oc;
      oc.shape = detail::parse_obstacle_shape(detail::require(item, path, "shape"), path + ".shape");
      oc.position = detail::as_vec2(detail::require(item, path, "position"), path + ".position");
      if (item.contains("velocity")) {
        oc.velocity = detail::as_vec2(item["velocity"], path + ".velocity");
      }
      if (item.contains("acceleration")) {
        oc.acceleration = detail::as_vec2(item["acceleration"], path + ".acceleration");
      }
      if (item.contains("points")) {
        oc.points = detail::as_int(item["points"], path + ".points");
      }
      if (item.contains("notes")) {
        detail::as_string(item["notes"], path + ".notes");
      }
      cfg.obstacles.push_back(std::move(oc));
    }
  }

  if (root.contains("controller")) {
    const Json& c = root["controller"];
    if (!c.is_object()) {
      throw ScenarioError("scenario.controller: expected an object");
    }
    detail::reject_unknown_keys(c, "scenario.controller",
                                {"alpha", "gamma_d", "gamma_theta", "r_weight", "h_weight",
                                 "delta_q", "sdf_mode", "grid_margin", "grid_resolution",
                                 "qp_tolerance", "qp_max_iterations"});
    ControllerParams& p = cfg.controller;
    p.alpha = detail::number_or(c, "scenario.controller", "alpha", p.alpha);
    p.gamma_d = detail::number_or(c, "scenario.controller", "gamma_d", p.gamma_d);
    p.gamma_theta = detail::number_or(c, "scenario.controller", "gamma_theta", p.gamma_theta);
    p.r_weight = detail::number_or(c, "scenario.controller", "r_weight", p.r_weight);
    p.h_weight = detail::number_or(c, "scenario.controller", "h_weight", p.h_weight);
    p.delta_q = detail::number_or(c, "scenario.controller", "delta_q", p.delta_q);
    p.grid_margin = detail::number_or(c, "scenario.controller", "grid_margin", p.grid_margin);
    p.grid_resolution =
        detail::number_or(c, "scenario.controller", "grid_resolution", p.grid_resolution);
    p.qp_tolerance = detail::number_or(c, "scenario.controller", "qp_tolerance", p.qp_tolerance);
    if (c.contains("qp_max_iterations")) {
      p.qp_max_iterations =
          detail::as_int(c["qp_max_iterations"], "scenario.controller.qp_max_iterations");
    }
    if (c.contains("sdf_mode")) {
      const std::string mode = detail::as_string(c["sdf_mode"], "scenario.controller.sdf_mode");
      if (mode == "analytic") {
        p.sdf_mode = SdfMode::Analytic;
      } else if (mode == "grid") {
        p.sdf_mode = SdfMode::Grid;
      } else {
        throw ScenarioError("scenario.controller.sdf_mode: expected 'analytic' or 'grid'");
      }
    }
  }

  if (root.contains("sim")) {
    const Json& s = root["sim"];
    if (!s.is_object()) {
      throw ScenarioError("scenario.sim: expected an object");
    }
    detail::reject_unknown_keys(s, "scenario.sim", {"dt", "t_max", "goal_tolerance"});
    cfg.sim.dt = detail::number_or(s, "scenario.sim", "dt", cfg.sim.dt);
    cfg.sim.t_max = detail::number_or(s, "scenario.sim", "t_max", cfg.sim.t_max);
    cfg.sim.goal_tolerance =
        detail::number_or(s, "scenario.sim", "goal_tolerance", cfg.sim.goal_tolerance);
  }

  if (root.contains("outputs")) {
    const Json& o = root["outputs"];
    if (!o.is_object()) {
      throw ScenarioError("scenario.outputs: expected an object");
    }
    detail::reject_unknown_keys(o, "scenario.outputs",
                                {"csv", "trajectory_svg", "cbf_svg", "controls_svg"});
    if (o.contains("csv")) {
      cfg.outputs.csv_path = detail::as_string(o["csv"], "scenario.outputs.csv");
    }
    if (o.contains("trajectory_svg")) {
      cfg.outputs.trajectory_svg =
          detail::as_string(o["trajectory_svg"], "scenario.outputs.trajectory_svg");
    }
    if (o.contains("cbf_svg")) {
      cfg.outputs.cbf_svg = detail::as_string(o["cbf_svg"], "scenario.outputs.cbf_svg");
    }
    if (o.contains("controls_svg")) {
      cfg.outputs.controls_svg =
          detail::as_string(o["controls_svg"], "scenario.outputs.controls_svg");
    }
  }

  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file " + path);
  }
  std::ostringstream oss;
  oss << in.rdbuf();
  try {
    return parse_scenario(oss.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

}  // namespace rcnav
