#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rcnav/dynamics.hpp"
#include "rcnav/qp.hpp"
#include "rcnav/safety.hpp"
#include "rcnav/scenario.hpp"
#include "rcnav/stability.hpp"

namespace rcnav {

enum class TerminalReason { GoalReached, Timeout, InfeasibleAbort };

inline const char* to_string(TerminalReason r) {
  switch (r) {
    case TerminalReason::GoalReached:
      return "goal_reached";
    case TerminalReason::Timeout:
      return "timeout";
    case TerminalReason::InfeasibleAbort:
      return "infeasible_abort";
  }
  return "unknown";
}

/// QP outcome of one step; None marks the trailing terminal record, where no
/// program is solved.
enum class StepStatus { Optimal, Infeasible, MaxIter, None };

inline const char* to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Optimal:
      return "optimal";
    case StepStatus::Infeasible:
      return "infeasible";
    case StepStatus::MaxIter:
      return "max_iter";
    case StepStatus::None:
      return "none";
  }
  return "unknown";
}

struct StepRecord {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // wrapped to (-pi, pi] for logging
  Vec2 u = Vec2::Zero();
  double delta_d = 0.0;
  double delta_theta = 0.0;
  double min_h = std::numeric_limits<double>::infinity();
  StepStatus qp_status = StepStatus::None;
  double solve_ms = 0.0;
  std::vector<double> obstacle_min_h;  // not serialized to CSV
};

struct TrajectoryLog {
  std::vector<StepRecord> steps;
  TerminalReason terminal = TerminalReason::Timeout;
  double dt = 0.0;
  int obstacle_count = 0;
};

/// Everything one control step produced, for tests and loggers.
struct StepDiagnostics {
  Vec2 u = Vec2::Zero();
  Vec2 delta = Vec2::Zero();  // (delta_d, delta_theta); second entry 0 if absent
  std::vector<ClfRow> clf;
  std::vector<CbfRow> cbf;
  QpProblem problem;
  QpSolution solution;
  double min_h = std::numeric_limits<double>::infinity();
  std::vector<double> obstacle_min_h;
  double solve_ms = 0.0;
};

/// One controller evaluation: build CLF and CBF rows for the current state,
/// assemble the QP, solve it. Pure function of its inputs. On a non-optimal
/// status the returned u is zero; the caller decides what to do with it.
inline StepDiagnostics control_step(const SdfField& field, const RobotState& state,
                                    const std::vector<Obstacle>& obstacles, const Goal& goal,
                                    const ControllerParams& params, const InputBounds& bounds) {
  const auto t_start = std::chrono::steady_clock::now();

  StepDiagnostics diag;
  diag.clf = clf_rows(state, goal, params.gamma_d, params.gamma_theta);
  diag.cbf = cbf_rows(field, state, obstacles, params.alpha);
  diag.problem = assemble(diag.clf, diag.cbf, bounds,
                          params.r_weight * Mat2::Identity(),
                          params.h_weight * Mat2::Identity());
  diag.solution = solve(diag.problem, params.qp_tolerance, params.qp_max_iterations);

  diag.solve_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();

  if (diag.solution.status == QpStatus::Optimal) {
    diag.u = diag.solution.z.head<2>();
    diag.delta.x() = diag.solution.z.size() > 2 ? diag.solution.z(2) : 0.0;
    diag.delta.y() = diag.solution.z.size() > 3 ? diag.solution.z(3) : 0.0;
  }

  diag.obstacle_min_h.assign(obstacles.size(),
                             std::numeric_limits<double>::infinity());
  for (const CbfRow& row : diag.cbf) {
    diag.min_h = std::min(diag.min_h, row.h);
    double& per = diag.obstacle_min_h[static_cast<std::size_t>(row.obstacle_id)];
    per = std::min(per, row.h);
  }
  return diag;
}

using StepObserver = std::function<void(const RobotState&, const StepDiagnostics&)>;

/// Closed-loop run: sense, solve, apply u over one dt, advance obstacles.
/// Terminates on goal tolerance, on t_max, or after ten consecutive
/// infeasible steps. The final record carries the terminal state with u = 0
/// and qp_status "none". Throws ScenarioError when the initial state is
/// already in contact.
inline TrajectoryLog run_scenario(const ScenarioConfig& cfg, const StepObserver& observer = {}) {
  cfg.validate();

  const SdfField field = cfg.make_field();
  std::vector<Obstacle> obstacles = cfg.make_obstacles();
  RobotState state = cfg.robot.initial_state();
  const Goal& goal = cfg.robot.goal;
  const double dt = cfg.sim.dt;

  {
    const BarrierSummary initial = min_barrier(field, state.pose(), obstacles);
    if (initial.min_h < 0.0) {
      throw ScenarioError("initial state unsafe: min h = " + std::to_string(initial.min_h));
    }
  }

  TrajectoryLog log;
  log.dt = dt;
  log.obstacle_count = static_cast<int>(obstacles.size());

  auto terminal_record = [&](double t) {
    const BarrierSummary summary = min_barrier(field, state.pose(), obstacles);
    StepRecord rec;
    rec.t = t;
    rec.x = state.x;
    rec.y = state.y;
    rec.theta = wrap_angle(state.theta);
    rec.min_h = summary.min_h;
    rec.obstacle_min_h = summary.per_obstacle;
    rec.qp_status = StepStatus::None;
    return rec;
  };

  int consecutive_infeasible = 0;
  for (long step = 0;; ++step) {
    const double t = static_cast<double>(step) * dt;

    if ((state.position() - goal.position()).norm() < cfg.sim.goal_tolerance) {
      log.steps.push_back(terminal_record(t));
      log.terminal = TerminalReason::GoalReached;
      break;
    }
    if (t >= cfg.sim.t_max) {
      log.steps.push_back(terminal_record(t));
      log.terminal = TerminalReason::Timeout;
      break;
    }
    if (consecutive_infeasible >= 10) {
      log.steps.push_back(terminal_record(t));
      log.terminal = TerminalReason::InfeasibleAbort;
      break;
    }

    const StepDiagnostics diag =
        control_step(field, state, obstacles, goal, cfg.controller, cfg.robot.bounds);
    if (observer) {
      observer(state, diag);
    }

    StepRecord rec;
    rec.t = t;
    rec.x = state.x;
    rec.y = state.y;
    rec.theta = wrap_angle(state.theta);
    rec.u = diag.u;
    rec.delta_d = diag.delta.x();
    rec.delta_theta = diag.delta.y();
    rec.min_h = diag.min_h;
    rec.obstacle_min_h = diag.obstacle_min_h;
    rec.solve_ms = diag.solve_ms;
    switch (diag.solution.status) {
      case QpStatus::Optimal:
        rec.qp_status = StepStatus::Optimal;
        consecutive_infeasible = 0;
        break;
      case QpStatus::Infeasible:
        rec.qp_status = StepStatus::Infeasible;
        ++consecutive_infeasible;
        break;
      case QpStatus::MaxIter:
        rec.qp_status = StepStatus::MaxIter;
        ++consecutive_infeasible;
        break;
    }
    log.steps.push_back(rec);

    state = step_robot(state, diag.u, dt);
    for (Obstacle& obstacle : obstacles) {
      obstacle.state = step_obstacle(obstacle.state, dt);
    }
  }
  return log;
}

/// Timing summary for the bench command: per-step controller latency
/// averaged across repetitions, plus aggregate statistics.
struct BenchReport {
  int repetitions = 0;
  long steps = 0;
  std::vector<double> per_step_ms;  // one entry per executed step
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
};

inline BenchReport bench_scenario(const ScenarioConfig& cfg, int repetitions) {
  if (repetitions < 1) {
    throw std::invalid_argument("bench_scenario: repetitions must be >= 1");
  }
  BenchReport report;
  report.repetitions = repetitions;

  std::vector<double> all;
  for (int rep = 0; rep < repetitions; ++rep) {
    const TrajectoryLog log = run_scenario(cfg);
    long executed = 0;
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
      if (log.steps[i].qp_status == StepStatus::None) {
        continue;
      }
      if (rep == 0) {
        report.per_step_ms.push_back(log.steps[i].solve_ms);
      } else if (executed < static_cast<long>(report.per_step_ms.size())) {
        report.per_step_ms[static_cast<std::size_t>(executed)] += log.steps[i].solve_ms;
      }
      all.push_back(log.steps[i].solve_ms);
      ++executed;
    }
    if (rep == 0) {
      report.steps = executed;
    }
  }
  for (double& v : report.per_step_ms) {
    v /= static_cast<double>(repetitions);
  }

  if (!all.empty()) {
    std::sort(all.begin(), all.end());
    double sum = 0.0;
    for (double v : all) {
      sum += v;
    }
    report.mean_ms = sum / static_cast<double>(all.size());
    report.median_ms = all[all.size() / 2];
    report.p95_ms = all[static_cast<std::size_t>(
        std::min(all.size() - 1, static_cast<std::size_t>(0.95 * static_cast<double>(all.size()))))];
  }
  return report;
}

}  // namespace rcnav
