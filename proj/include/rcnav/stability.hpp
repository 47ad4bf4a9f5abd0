#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rcnav/dynamics.hpp"

namespace rcnav {

/// Navigation target. The destination heading is recorded for logs only;
/// neither Lyapunov function uses it.
struct Goal {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
};

struct ClfDistance {
  double value = 0.0;   // squared distance to the goal position
  Vec2 gradient = Vec2::Zero();
};

/// V_d = (x - x_d)^2 + (y - y_d)^2 with its position gradient.
inline ClfDistance clf_distance(const RobotState& state, const Goal& goal) {
  const double ex = state.x - goal.x;
  const double ey = state.y - goal.y;
  return {ex * ex + ey * ey, Vec2(2.0 * ex, 2.0 * ey)};
}

struct ClfHeading {
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();  // over (x, y, theta)
};

/// V_theta = [cos(theta)(y_d - y) - sin(theta)(x_d - x)]^2: the squared
/// cross-track offset of the goal from the heading line. Zero when the goal
/// lies on the heading line (ahead or behind), so it steers omega only.
inline ClfHeading clf_heading(const RobotState& state, const Goal& goal) {
  if (state.model != RobotModel::Unicycle) {
    throw std::invalid_argument("clf_heading: only defined for the unicycle model");
  }
  const double c = std::cos(state.theta);
  const double s = std::sin(state.theta);
  const double dx = goal.x - state.x;
  const double dy = goal.y - state.y;
  const double cross = c * dy - s * dx;

  ClfHeading out;
  out.value = cross * cross;
  out.gradient(0) = 2.0 * cross * s;
  out.gradient(1) = 2.0 * cross * (-c);
  out.gradient(2) = 2.0 * cross * (-s * dy - c * dx);
  return out;
}

/// One relaxed stability constraint for the QP: a_u * u + b <= delta_k,
/// with a_u = L_g V and b = L_f V + gamma * V.
struct ClfRow {
  Eigen::RowVector2d a_u = Eigen::RowVector2d::Zero();
  double b = 0.0;
  int slack_index = 0;  // 0: delta_d, 1: delta_theta
};

/// Stability rows for the current state: the distance CLF alone for the
/// single integrator, distance plus heading for the unicycle.
inline std::vector<ClfRow> clf_rows(const RobotState& state, const Goal& goal,
                                    double gamma_d, double gamma_theta) {
  if (!(gamma_d > 0.0) || !(gamma_theta > 0.0)) {
    throw std::invalid_argument("clf_rows: class-K gains must be > 0");
  }
  const AffineFields af = affine_fields(state);
  std::vector<ClfRow> rows;

  const ClfDistance vd = clf_distance(state, goal);
  Eigen::VectorXd grad_d = Eigen::VectorXd::Zero(state.state_dim());
  grad_d.head<2>() = vd.gradient;
  ClfRow row_d;
  row_d.a_u = (grad_d.transpose() * af.g).eval();
  row_d.b = grad_d.dot(af.f) + gamma_d * vd.value;
  row_d.slack_index = 0;
  rows.push_back(row_d);

  if (state.model == RobotModel::Unicycle) {
    const ClfHeading vt = clf_heading(state, goal);
    ClfRow row_t;
    row_t.a_u = (vt.gradient.transpose() * af.g).eval();
    // The heading CLF cannot act on v: its gradient is orthogonal to the
    // translation column of g. Pin the structural zero exactly.
    row_t.a_u(0) = 0.0;
    row_t.b = vt.gradient.dot(af.f) + gamma_theta * vt.value;
    row_t.slack_index = 1;
    rows.push_back(row_t);
  }
  return rows;
}

}  // namespace rcnav
