#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcnav/dynamics.hpp"
#include "rcnav/geometry.hpp"
#include "rcnav/stability.hpp"

namespace rcnav {

struct Obstacle;  // safety.hpp

enum class SdfMode { Analytic, Grid };

/// Controller gains and numerics. Defaults match the bundled experiment
/// scenarios: alpha = gamma_d = 1, gamma_theta = 3, slack weight 1000.
struct ControllerParams {
  double alpha = 1.0;
  double gamma_d = 1.0;
  double gamma_theta = 3.0;
  double r_weight = 1.0;     // R = r_weight * I
  double h_weight = 1000.0;  // H = h_weight * I
  double delta_q = kDefaultSdfStep;
  SdfMode sdf_mode = SdfMode::Analytic;
  double grid_margin = 3.0;
  double grid_resolution = 0.05;
  double qp_tolerance = 1e-8;
  int qp_max_iterations = 200;
};

struct RobotConfig {
  RobotModel model = RobotModel::SingleIntegrator;
  std::vector<Primitive> shape;
  double x0 = 0.0;
  double y0 = 0.0;
  double theta0 = 0.0;
  Goal goal;
  InputBounds bounds;

  RobotState initial_state() const { return {model, x0, y0, theta0}; }
};

struct ObstacleConfig {
  ObstacleShape shape;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();
  int points = 24;
};

struct SimParams {
  double dt = 0.1;
  double t_max = 20.0;
  double goal_tolerance = 0.1;
};

struct OutputConfig {
  std::string csv_path;
  std::string trajectory_svg;
  std::string cbf_svg;
  std::string controls_svg;
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Declarative description of one experiment.
struct ScenarioConfig {
  std::string name;
  RobotConfig robot;
  std::vector<ObstacleConfig> obstacles;
  ControllerParams controller;
  SimParams sim;
  OutputConfig outputs;

  void validate() const {
    auto fail = [](const std::string& what) { throw ScenarioError("scenario: " + what); };
    if (robot.shape.empty()) {
      fail("robot.shape must contain at least one primitive");
    }
    if (!std::isfinite(robot.x0) || !std::isfinite(robot.y0) || !std::isfinite(robot.theta0)) {
      fail("robot start must be finite");
    }
    if (!std::isfinite(robot.goal.x) || !std::isfinite(robot.goal.y)) {
      fail("robot goal must be finite");
    }
    if (!robot.bounds.lo.allFinite() || !robot.bounds.hi.allFinite()) {
      fail("robot.bounds must be finite");
    }
    if (robot.bounds.lo.x() > robot.bounds.hi.x() || robot.bounds.lo.y() > robot.bounds.hi.y()) {
      fail("robot.bounds violates u_min <= u_max");
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const ObstacleConfig& o = obstacles[i];
      const std::string tag = "obstacles[" + std::to_string(i) + "]";
      if (o.points < 3) {
        fail(tag + ".points must be >= 3");
      }
      if (!o.position.allFinite() || !o.velocity.allFinite() || !o.acceleration.allFinite()) {
        fail(tag + " state must be finite");
      }
    }
    if (!(controller.alpha > 0.0) || !(controller.gamma_d > 0.0) ||
        !(controller.gamma_theta > 0.0)) {
      fail("controller rates alpha, gamma_d, gamma_theta must be > 0");
    }
    if (!(controller.r_weight > 0.0) || !(controller.h_weight > 0.0)) {
      fail("controller weights must be > 0");
    }
    if (!(controller.delta_q > 0.0)) {
      fail("controller.delta_q must be > 0");
    }
    if (!(controller.grid_margin >= 0.0) || !(controller.grid_resolution > 0.0)) {
      fail("controller grid parameters invalid");
    }
    if (!(controller.qp_tolerance > 0.0) || controller.qp_max_iterations < 1) {
      fail("controller QP settings invalid");
    }
    if (!(sim.dt > 0.0)) {
      fail("sim.dt must be > 0");
    }
    if (!(sim.t_max > sim.dt)) {
      fail("sim.t_max must exceed sim.dt");
    }
    if (!(sim.goal_tolerance > 0.0)) {
      fail("sim.goal_tolerance must be > 0");
    }
  }

  RobotShape make_shape() const { return RobotShape(robot.shape); }

  SdfField make_field() const {
    RobotShape shape = make_shape();
    if (controller.sdf_mode == SdfMode::Grid) {
      SdfGrid grid = build_grid(shape, controller.grid_margin, controller.grid_resolution);
      return SdfField(std::move(shape), std::move(grid), controller.delta_q);
    }
    return SdfField(std::move(shape), controller.delta_q);
  }

  std::vector<Obstacle> make_obstacles() const;  // defined in safety-aware code below
};

}  // namespace rcnav

#include "rcnav/safety.hpp"

namespace rcnav {

inline std::vector<Obstacle> ScenarioConfig::make_obstacles() const {
  std::vector<Obstacle> out;
  out.reserve(obstacles.size());
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const ObstacleConfig& cfg = obstacles[i];
    ObstacleState state;
    state.position = cfg.position;
    state.velocity = cfg.velocity;
    state.acceleration = cfg.acceleration;
    out.push_back(Obstacle::make(static_cast<int>(i), cfg.shape, state, cfg.points));
  }
  return out;
}

}  // namespace rcnav
