#include "rcnav/stability.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_oracles.hpp"

namespace rcnav {
namespace {

TEST(ClfDistance, ZeroAtGoal) {
  const RobotState s{RobotModel::SingleIntegrator, 3.0, 4.0, 0.0};
  const Goal goal{3.0, 4.0, 0.0};
  const ClfDistance v = clf_distance(s, goal);
  EXPECT_DOUBLE_EQ(v.value, 0.0);
  EXPECT_TRUE(v.gradient.isZero());
}

TEST(ClfDistance, HandValue) {
  const RobotState s{RobotModel::SingleIntegrator, 0.0, 0.0, 0.0};
  const Goal goal{3.0, 4.0, 0.0};
  const ClfDistance v = clf_distance(s, goal);
  EXPECT_DOUBLE_EQ(v.value, 25.0);
  EXPECT_DOUBLE_EQ(v.gradient.x(), -6.0);
  EXPECT_DOUBLE_EQ(v.gradient.y(), -8.0);
}

TEST(ClfDistance, GradientMatchesFiniteDifference) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const Goal goal{coord(rng), coord(rng), 0.0};
    const RobotState s{RobotModel::SingleIntegrator, coord(rng), coord(rng), 0.0};
    const ClfDistance v = clf_distance(s, goal);
    for (int axis = 0; axis < 2; ++axis) {
      const double fd = testing::central_difference(
          [&](double val) {
            RobotState ss = s;
            (axis == 0 ? ss.x : ss.y) = val;
            return clf_distance(ss, goal).value;
          },
          axis == 0 ? s.x : s.y, 1e-5);
      EXPECT_NEAR(v.gradient[axis], fd, 1e-6);
    }
  }
}

TEST(ClfHeading, ZeroWhenGoalDeadAhead) {
  const RobotState s{RobotModel::Unicycle, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(clf_heading(s, Goal{5.0, 0.0, 0.0}).value, 0.0);
}

TEST(ClfHeading, UnitOffsetToTheSide) {
  const RobotState s{RobotModel::Unicycle, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(clf_heading(s, Goal{0.0, 1.0, 0.0}).value, 1.0);
}

TEST(ClfHeading, RejectsSingleIntegrator) {
  const RobotState s{RobotModel::SingleIntegrator, 0.0, 0.0, 0.0};
  EXPECT_THROW(clf_heading(s, Goal{1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(ClfHeading, GradientMatchesFiniteDifferenceEverywhere) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-8.0, 8.0);
  std::uniform_real_distribution<double> angle(-3.5, 3.5);
  for (int i = 0; i < 1000; ++i) {
    const Goal goal{coord(rng), coord(rng), 0.0};
    const RobotState s{RobotModel::Unicycle, coord(rng), coord(rng), angle(rng)};
    const ClfHeading v = clf_heading(s, goal);
    auto value_at = [&](int axis, double val) {
      RobotState ss = s;
      if (axis == 0) {
        ss.x = val;
      } else if (axis == 1) {
        ss.y = val;
      } else {
        ss.theta = val;
      }
      return clf_heading(ss, goal).value;
    };
    const double base[3] = {s.x, s.y, s.theta};
    for (int axis = 0; axis < 3; ++axis) {
      const double fd = testing::central_difference(
          [&](double val) { return value_at(axis, val); }, base[axis], 1e-5);
      EXPECT_NEAR(v.gradient(axis), fd, 1e-6) << "axis " << axis;
    }
  }
}

TEST(ClfRows, UnicycleHandExample) {
  const RobotState s{RobotModel::Unicycle, 0.0, 0.0, 0.0};
  const Goal goal{1.0, 0.0, 0.0};
  const auto rows = clf_rows(s, goal, 1.0, 3.0);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].a_u(0), -2.0);
  EXPECT_DOUBLE_EQ(rows[0].a_u(1), 0.0);
  EXPECT_DOUBLE_EQ(rows[0].b, 1.0);
  EXPECT_EQ(rows[0].slack_index, 0);
  EXPECT_EQ(rows[1].slack_index, 1);
}

TEST(ClfRows, SingleIntegratorAtGoalIsTriviallySatisfiable) {
  const RobotState s{RobotModel::SingleIntegrator, 2.0, 2.0, 0.0};
  const Goal goal{2.0, 2.0, 0.0};
  const auto rows = clf_rows(s, goal, 1.0, 3.0);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].a_u.isZero());
  EXPECT_DOUBLE_EQ(rows[0].b, 0.0);
}

TEST(ClfRows, StructuralZeros) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-8.0, 8.0);
  std::uniform_real_distribution<double> angle(-3.5, 3.5);
  for (int i = 0; i < 500; ++i) {
    const RobotState s{RobotModel::Unicycle, coord(rng), coord(rng), angle(rng)};
    const Goal goal{coord(rng), coord(rng), 0.0};
    const auto rows = clf_rows(s, goal, 1.0, 3.0);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].a_u(1), 0.0);  // V_d never constrains omega
    EXPECT_EQ(rows[1].a_u(0), 0.0);  // V_theta never constrains v
  }
}

TEST(ClfRows, RejectsNonPositiveGains) {
  const RobotState s{RobotModel::Unicycle, 0.0, 0.0, 0.0};
  EXPECT_THROW(clf_rows(s, Goal{1.0, 0.0, 0.0}, 0.0, 3.0), std::invalid_argument);
  EXPECT_THROW(clf_rows(s, Goal{1.0, 0.0, 0.0}, 1.0, -1.0), std::invalid_argument);
}

// Lie-derivative correctness: dV/dt along a micro Euler step equals
// L_f V + L_g V u.
TEST(ClfRows, LieDerivativeMatchesMicroStep) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> coord(-6.0, 6.0);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  std::uniform_real_distribution<double> input(-2.0, 2.0);
  const double eps = 1e-6;
  for (int i = 0; i < 500; ++i) {
    const RobotState s{RobotModel::Unicycle, coord(rng), coord(rng), angle(rng)};
    const Goal goal{coord(rng), coord(rng), 0.0};
    const Vec2 u(input(rng), input(rng));
    // Both models are driftless, so stepping with -u walks the flow backwards;
    // the centered quotient cancels the curvature term of the micro-step.
    const RobotState fwd = step_robot(s, u, eps);
    const RobotState bwd = step_robot(s, -u, eps);

    const double vd_dot_pred = clf_rows(s, goal, 1.0, 1.0)[0].a_u.dot(u);
    const double vd_dot =
        (clf_distance(fwd, goal).value - clf_distance(bwd, goal).value) / (2.0 * eps);
    EXPECT_NEAR(vd_dot_pred, vd_dot, 1e-4);

    const double vt_dot_pred = clf_rows(s, goal, 1.0, 1.0)[1].a_u.dot(u);
    const double vt_dot =
        (clf_heading(fwd, goal).value - clf_heading(bwd, goal).value) / (2.0 * eps);
    EXPECT_NEAR(vt_dot_pred, vt_dot, 1e-4);
  }
}

TEST(ClfValues, NonNegativityAndZeroSets) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> coord(-6.0, 6.0);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const RobotState s{RobotModel::Unicycle, coord(rng), coord(rng), angle(rng)};
    const Goal goal{coord(rng), coord(rng), 0.0};
    EXPECT_GE(clf_distance(s, goal).value, 0.0);
    EXPECT_GE(clf_heading(s, goal).value, 0.0);
  }
  // V_theta vanishes when the goal is on the heading line, even behind.
  const RobotState s{RobotModel::Unicycle, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(clf_heading(s, Goal{-4.0, 0.0, 0.0}).value, 0.0);
}

}  // namespace
}  // namespace rcnav
