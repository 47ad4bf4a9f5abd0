#pragma once

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "rcnav/geometry.hpp"

namespace rcnav {

enum class RobotModel { SingleIntegrator, Unicycle };

/// Robot configuration. For the single integrator, theta is a fixed body
/// orientation (the shape still needs a frame); it never changes under
/// step_robot. Heading is kept unwrapped; wrap only for display.
struct RobotState {
  RobotModel model = RobotModel::SingleIntegrator;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  Pose2 pose() const { return {{x, y}, theta}; }
  int state_dim() const { return model == RobotModel::Unicycle ? 3 : 2; }
};

/// (v_x, v_y) for the single integrator, (v, omega) for the unicycle.
using ControlInput = Vec2;

struct InputBounds {
  Vec2 lo = Vec2::Constant(-std::numeric_limits<double>::infinity());
  Vec2 hi = Vec2::Constant(std::numeric_limits<double>::infinity());
};

/// Obstacle with double-integrator dynamics. All bundled scenarios use
/// zero acceleration (constant velocity).
struct ObstacleState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();
};

/// Control-affine decomposition xdot = f(x) + g(x) u. Both models have
/// zero drift; g is identity for the single integrator and the heading
/// projection for the unicycle.
struct AffineFields {
  Eigen::VectorXd f;
  Eigen::MatrixXd g;
};

inline AffineFields affine_fields(const RobotState& state) {
  AffineFields out;
  if (state.model == RobotModel::SingleIntegrator) {
    out.f = Eigen::VectorXd::Zero(2);
    out.g = Eigen::MatrixXd::Identity(2, 2);
  } else {
    out.f = Eigen::VectorXd::Zero(3);
    out.g = Eigen::MatrixXd::Zero(3, 2);
    out.g(0, 0) = std::cos(state.theta);
    out.g(1, 0) = std::sin(state.theta);
    out.g(2, 1) = 1.0;
  }
  return out;
}

/// Explicit Euler step of the robot model.
inline RobotState step_robot(const RobotState& state, const ControlInput& u, double dt) {
  assert(dt > 0.0);
  const AffineFields af = affine_fields(state);
  const Eigen::VectorXd xdot = af.f + af.g * u;
  RobotState next = state;
  next.x += dt * xdot(0);
  next.y += dt * xdot(1);
  if (state.model == RobotModel::Unicycle) {
    next.theta += dt * xdot(2);
  }
  return next;
}

/// Explicit Euler step of the obstacle double integrator.
inline ObstacleState step_obstacle(const ObstacleState& state, double dt) {
  assert(dt > 0.0);
  ObstacleState next = state;
  next.position += dt * state.velocity;
  next.velocity += dt * state.acceleration;
  return next;
}

/// Wrap an angle to (-pi, pi] for logs and plots.
inline double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * M_PI);
  if (w <= -M_PI) {
    w += 2.0 * M_PI;
  }
  return w;
}

}  // namespace rcnav
