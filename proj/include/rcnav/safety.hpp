#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rcnav/dynamics.hpp"
#include "rcnav/geometry.hpp"

namespace rcnav {

/// An obstacle: outline, double-integrator state, and the boundary points
/// sampled once in the obstacle's local frame. Obstacles translate without
/// rotating, so world points are local points shifted by the current position.
struct Obstacle {
  int id = 0;
  ObstacleShape shape;
  ObstacleState state;
  std::vector<Vec2> local_points;

  static Obstacle make(int id, ObstacleShape shape, const ObstacleState& state,
                       int point_count) {
    Obstacle o;
    o.id = id;
    o.shape = std::move(shape);
    o.state = state;
    o.local_points = sample_boundary(o.shape, point_count);
    return o;
  }
};

inline CollisionPointSet world_points(const Obstacle& obstacle) {
  CollisionPointSet set;
  set.obstacle_id = obstacle.id;
  set.points.reserve(obstacle.local_points.size());
  for (const Vec2& q : obstacle.local_points) {
    set.points.push_back(q + obstacle.state.position);
  }
  return set;
}

/// Barrier value for a world-frame collision point: the robot-frame SDF at
/// the point transformed into the body frame.
inline double barrier_value(const SdfField& field, const Pose2& pose, const Vec2& q_w) {
  return field.value(world_to_body(pose, q_w));
}

struct BarrierGradients {
  Vec2 dh_dp = Vec2::Zero();
  double dh_dtheta = 0.0;
  Vec2 dh_dqw = Vec2::Zero();
};

/// Chain-rule gradients of the barrier. With s = dh/dq_b from the field:
///   dh/dp  = -R(theta) s
///   dh/dth = (q_w - p)^T [[-sin, -cos], [cos, -sin]] s
///   dh/dqw =  R(theta) s
inline BarrierGradients chain_gradients(const Pose2& pose, const Vec2& q_w,
                                        const Vec2& body_gradient) {
  const double c = std::cos(pose.theta);
  const double sn = std::sin(pose.theta);

  BarrierGradients out;
  out.dh_dqw = rotation2(pose.theta) * body_gradient;
  out.dh_dp = -out.dh_dqw;
  Mat2 d_rot;
  d_rot << -sn, -c, c, -sn;
  out.dh_dtheta = (q_w - pose.p).transpose() * d_rot * body_gradient;
  return out;
}

inline BarrierGradients barrier_gradients(const SdfField& field, const Pose2& pose,
                                          const Vec2& q_w) {
  return chain_gradients(pose, q_w, field.gradient(world_to_body(pose, q_w)));
}

/// One safety constraint for the QP: a_u * u + b >= 0, with a_u = L_g h and
/// b = L_f h + dh/dt + alpha * h. dh/dt carries the obstacle velocity.
struct CbfRow {
  Eigen::RowVector2d a_u = Eigen::RowVector2d::Zero();
  double b = 0.0;
  double h = 0.0;
  int obstacle_id = 0;
  int point_index = 0;
};

/// One row per collision point of every obstacle, in (obstacle, point) order.
inline std::vector<CbfRow> cbf_rows(const SdfField& field, const RobotState& state,
                                    const std::vector<Obstacle>& obstacles, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("cbf_rows: alpha must be > 0");
  }
  const Pose2 pose = state.pose();
  const AffineFields af = affine_fields(state);
  const int dim = state.state_dim();

  std::vector<CbfRow> rows;
  for (const Obstacle& obstacle : obstacles) {
    for (std::size_t j = 0; j < obstacle.local_points.size(); ++j) {
      const Vec2 q_w = obstacle.local_points[j] + obstacle.state.position;
      const Vec2 q_b = world_to_body(pose, q_w);
      const SdfSample sample = field.value_and_gradient(q_b);
      const BarrierGradients grads = chain_gradients(pose, q_w, sample.gradient);

      Eigen::VectorXd dh_dx = Eigen::VectorXd::Zero(dim);
      dh_dx.head<2>() = grads.dh_dp;
      if (dim == 3) {
        dh_dx(2) = grads.dh_dtheta;
      }

      CbfRow row;
      row.a_u = (dh_dx.transpose() * af.g).eval();
      row.b = dh_dx.dot(af.f) + grads.dh_dqw.dot(obstacle.state.velocity) +
              alpha * sample.value;
      row.h = sample.value;
      row.obstacle_id = obstacle.id;
      row.point_index = static_cast<int>(j);
      rows.push_back(row);
    }
  }
  return rows;
}

/// Smallest barrier value over all collision points, globally and per obstacle.
struct BarrierSummary {
  double min_h = std::numeric_limits<double>::infinity();
  std::vector<double> per_obstacle;
};

inline BarrierSummary min_barrier(const SdfField& field, const Pose2& pose,
                                  const std::vector<Obstacle>& obstacles) {
  BarrierSummary out;
  out.per_obstacle.reserve(obstacles.size());
  for (const Obstacle& obstacle : obstacles) {
    double h_min = std::numeric_limits<double>::infinity();
    for (const Vec2& q : obstacle.local_points) {
      h_min = std::min(h_min, barrier_value(field, pose, q + obstacle.state.position));
    }
    out.per_obstacle.push_back(h_min);
    out.min_h = std::min(out.min_h, h_min);
  }
  return out;
}

}  // namespace rcnav
