#include "rcnav/safety.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_oracles.hpp"

namespace rcnav {
namespace {

using testing::l_shape;
using testing::ShapeOracle;

TEST(BarrierValue, ZeroOnRobotBoundary) {
  const SdfField field(RobotShape({Primitive::circle(1.0)}));
  const Pose2 pose{{2.0, 1.0}, 0.7};
  const Vec2 q_w = body_to_world(pose, Vec2(1.0, 0.0));
  EXPECT_NEAR(barrier_value(field, pose, q_w), 0.0, 1e-12);
}

TEST(BarrierValue, CircleRobotPlainDistance) {
  const SdfField field(RobotShape({Primitive::circle(1.0)}));
  const Pose2 pose{{0.0, 0.0}, 0.0};
  EXPECT_DOUBLE_EQ(barrier_value(field, pose, Vec2(3.0, 0.0)), 2.0);
}

TEST(BarrierValue, LShapeMatchesOracle) {
  const SdfField field(l_shape());
  const ShapeOracle oracle(l_shape(), 400000);
  const Pose2 pose{{1.0, 1.0}, M_PI / 4.0};
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-3.0, 5.0);
  int tested = 0;
  for (int i = 0; i < 300 && tested < 200; ++i) {
    const Vec2 q_w(coord(rng), coord(rng));
    const Vec2 q_b = world_to_body(pose, q_w);
    const double h = barrier_value(field, pose, q_w);
    if (std::abs(h) < 1e-3) {
      continue;  // sampling error of the oracle is unbounded on the boundary
    }
    ++tested;
    EXPECT_NEAR(h, oracle.signed_distance(q_b), 1e-6);
  }
  EXPECT_GE(tested, 100);
}

TEST(BarrierGradients, TranslationAntisymmetry) {
  const SdfField field(l_shape());
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const Pose2 pose{{coord(rng), coord(rng)}, angle(rng)};
    const Vec2 q_w(coord(rng), coord(rng));
    const BarrierGradients g = barrier_gradients(field, pose, q_w);
    EXPECT_TRUE((g.dh_dp + g.dh_dqw).isZero(0.0));
  }
}

TEST(BarrierGradients, CircleRobotHasNoHeadingSensitivity) {
  const SdfField field(RobotShape({Primitive::circle(1.0)}));
  const Pose2 pose{{1.0, -2.0}, 0.9};
  const BarrierGradients g = barrier_gradients(field, pose, Vec2(4.0, 1.0));
  EXPECT_NEAR(g.dh_dtheta, 0.0, 1e-6);
}

TEST(BarrierGradients, MatchesFiniteDifferencesOnLShape) {
  const SdfField field(l_shape());
  const Pose2 pose{{2.0, 1.0}, 0.7};
  const Vec2 q_w(3.5, 2.0);
  const BarrierGradients g = barrier_gradients(field, pose, q_w);
  const double step = 1e-5;

  for (int axis = 0; axis < 2; ++axis) {
    const double fd_p = testing::central_difference(
        [&](double v) {
          Pose2 p2 = pose;
          p2.p[axis] = v;
          return barrier_value(field, p2, q_w);
        },
        pose.p[axis], step);
    EXPECT_NEAR(g.dh_dp[axis], fd_p, 1e-4);

    const double fd_q = testing::central_difference(
        [&](double v) {
          Vec2 q2 = q_w;
          q2[axis] = v;
          return barrier_value(field, pose, q2);
        },
        q_w[axis], step);
    EXPECT_NEAR(g.dh_dqw[axis], fd_q, 1e-4);
  }
  const double fd_theta = testing::central_difference(
      [&](double v) {
        Pose2 p2 = pose;
        p2.theta = v;
        return barrier_value(field, p2, q_w);
      },
      pose.theta, step);
  EXPECT_NEAR(g.dh_dtheta, fd_theta, 1e-4);
}

TEST(CbfRows, StaticObstacleHasNoTimeTerm) {
  const SdfField field(RobotShape({Primitive::circle(1.0)}));
  const RobotState state{RobotModel::SingleIntegrator, 0.0, 0.0, 0.0};
  ObstacleState os;
  os.position = Vec2(3.0, 0.0);
  const Obstacle obstacle = Obstacle::make(0, ObstacleShape::circle(0.5), os, 8);
  const auto rows = cbf_rows(field, state, {obstacle}, 1.0);
  ASSERT_EQ(rows.size(), 8u);
  for (const CbfRow& row : rows) {
    // b = dh/dt + alpha * h reduces to alpha * h for a static obstacle.
    EXPECT_DOUBLE_EQ(row.b, 1.0 * row.h);
  }
}

TEST(CbfRows, HandCheckedCircleRow) {
  const SdfField field(RobotShape({Primitive::circle(1.0)}));
  const RobotState state{RobotModel::SingleIntegrator, 0.0, 0.0, 0.0};
  Obstacle obstacle;
  obstacle.id = 0;
  obstacle.shape = ObstacleShape::circle(1.0);  // outline unused here
  obstacle.local_points = {Vec2(3.0, 0.0)};
  const auto rows = cbf_rows(field, state, {obstacle}, 1.0);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].h, 2.0, 1e-12);
  EXPECT_NEAR(rows[0].a_u(0), -1.0, 1e-9);
  EXPECT_NEAR(rows[0].a_u(1), 0.0, 1e-9);
  EXPECT_NEAR(rows[0].b, 2.0, 1e-9);

  // One Euler micro-step with u = (u_x, 0) changes h at rate -u_x.
  const double eps = 1e-6;
  const Vec2 u(0.7, 0.0);
  const RobotState next = step_robot(state, u, eps);
  const double h_next = barrier_value(field, next.pose(), Vec2(3.0, 0.0));
  EXPECT_NEAR((h_next - rows[0].h) / eps, -u.x(), 1e-5);
}

TEST(CbfRows, RowCountAndOrdering) {
  const SdfField field(l_shape());
  const RobotState state{RobotModel::Unicycle, 0.0, 0.0, 0.2};
  std::vector<Obstacle> obstacles;
  for (int i = 0; i < 3; ++i) {
    ObstacleState os;
    os.position = Vec2(4.0 + i, 4.0 - i);
    obstacles.push_back(Obstacle::make(i, ObstacleShape::rectangle(0.5, 0.5), os, 24));
  }
  const auto rows = cbf_rows(field, state, obstacles, 1.0);
  ASSERT_EQ(rows.size(), 72u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].obstacle_id, static_cast<int>(k / 24));
    EXPECT_EQ(rows[k].point_index, static_cast<int>(k % 24));
  }
  EXPECT_THROW(cbf_rows(field, state, obstacles, 0.0), std::invalid_argument);
}

// Chain-rule correctness: the predicted hdot matches a joint robot/obstacle
// micro-step within 0.1% relative error.
TEST(CbfRows, PredictedHdotMatchesJointMicroStep) {
  const SdfField field(l_shape());
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  std::uniform_real_distribution<double> input(-2.0, 2.0);
  std::uniform_real_distribution<double> vel(-1.0, 1.0);
  const double eps = 1e-6;

  int tested = 0;
  for (int i = 0; i < 3000 && tested < 1000; ++i) {
    const RobotState state{RobotModel::Unicycle, coord(rng), coord(rng), angle(rng)};
    Obstacle obstacle;
    obstacle.id = 0;
    obstacle.shape = ObstacleShape::circle(1.0);
    obstacle.state.position = Vec2(coord(rng), coord(rng));
    obstacle.state.velocity = Vec2(vel(rng), vel(rng));
    obstacle.local_points = {Vec2(0.3, -0.2)};

    const auto rows = cbf_rows(field, state, {obstacle}, 1.0);
    ASSERT_EQ(rows.size(), 1u);
    const Vec2 u(input(rng), input(rng));
    const double hdot_pred = rows[0].a_u.dot(u) + (rows[0].b - 1.0 * rows[0].h);

    const RobotState next = step_robot(state, u, eps);
    Obstacle moved = obstacle;
    moved.state = step_obstacle(obstacle.state, eps);
    const double h_next = barrier_value(
        field, next.pose(), moved.local_points[0] + moved.state.position);
    const double hdot_measured = (h_next - rows[0].h) / eps;

    if (std::abs(hdot_measured) < 1e-3) {
      continue;  // relative error ill-defined near stationary points
    }
    ++tested;
    EXPECT_NEAR(hdot_pred, hdot_measured,
                1e-3 * std::abs(hdot_measured) + 1e-6)
        << "state " << state.x << "," << state.y << "," << state.theta;
  }
  EXPECT_GE(tested, 1000);
}

TEST(Barrier, RigidMotionConsistency) {
  const SdfField field(l_shape());
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const Pose2 pose{{coord(rng), coord(rng)}, angle(rng)};
    const Vec2 q_w(coord(rng), coord(rng));

    const Pose2 motion{{coord(rng), coord(rng)}, angle(rng)};
    Pose2 moved_pose;
    moved_pose.p = body_to_world(motion, pose.p);
    moved_pose.theta = motion.theta + pose.theta;
    const Vec2 moved_q = body_to_world(motion, q_w);

    EXPECT_NEAR(barrier_value(field, pose, q_w),
                barrier_value(field, moved_pose, moved_q), 1e-9);
  }
}

TEST(Obstacle, WorldPointsTrackPosition) {
  ObstacleState os;
  os.position = Vec2(2.0, 3.0);
  const Obstacle obstacle = Obstacle::make(4, ObstacleShape::circle(1.0), os, 4);
  const CollisionPointSet set = world_points(obstacle);
  EXPECT_EQ(set.obstacle_id, 4);
  ASSERT_EQ(set.points.size(), 4u);
  EXPECT_TRUE(set.points[0].isApprox(Vec2(3.0, 3.0)));
  EXPECT_TRUE((set.points[1] - Vec2(2.0, 4.0)).norm() < 1e-12);
}

TEST(MinBarrier, ReportsPerObstacleMinima) {
  const SdfField field(RobotShape({Primitive::circle(1.0)}));
  ObstacleState near_state;
  near_state.position = Vec2(3.0, 0.0);
  ObstacleState far_state;
  far_state.position = Vec2(10.0, 0.0);
  const std::vector<Obstacle> obstacles = {
      Obstacle::make(0, ObstacleShape::circle(0.5), near_state, 16),
      Obstacle::make(1, ObstacleShape::circle(0.5), far_state, 16)};
  const BarrierSummary summary = min_barrier(field, Pose2{}, obstacles);
  ASSERT_EQ(summary.per_obstacle.size(), 2u);
  EXPECT_NEAR(summary.per_obstacle[0], 1.5, 1e-12);
  EXPECT_NEAR(summary.per_obstacle[1], 8.5, 1e-12);
  EXPECT_DOUBLE_EQ(summary.min_h, summary.per_obstacle[0]);
}

}  // namespace
}  // namespace rcnav
