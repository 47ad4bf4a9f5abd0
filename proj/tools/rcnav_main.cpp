// Command-line front end: run scenarios, render plots, validate files, and
// benchmark the controller. See README.md for the scenario schema.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rcnav/rcnav.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

int cmd_run(const std::string& path, double dt_override, double tmax_override,
            const std::string& sdf_mode, const std::string& csv_override) {
  rcnav::ScenarioConfig cfg = rcnav::load_scenario(path);
  if (dt_override > 0.0) {
    cfg.sim.dt = dt_override;
  }
  if (tmax_override > 0.0) {
    cfg.sim.t_max = tmax_override;
  }
  if (sdf_mode == "analytic") {
    cfg.controller.sdf_mode = rcnav::SdfMode::Analytic;
  } else if (sdf_mode == "grid") {
    cfg.controller.sdf_mode = rcnav::SdfMode::Grid;
  } else if (!sdf_mode.empty()) {
    throw std::runtime_error("--sdf-mode must be 'analytic' or 'grid'");
  }
  cfg.validate();

  const rcnav::TrajectoryLog log = rcnav::run_scenario(cfg);

  const std::string csv_path = !csv_override.empty() ? csv_override : cfg.outputs.csv_path;
  if (!csv_path.empty()) {
    write_file(csv_path, rcnav::to_csv(log));
  }

  if (!cfg.outputs.trajectory_svg.empty() || !cfg.outputs.cbf_svg.empty() ||
      !cfg.outputs.controls_svg.empty()) {
    if (!cfg.outputs.trajectory_svg.empty()) {
      std::ostringstream oss;
      rcnav::plot_trajectory(log.steps, cfg, oss);
      write_file(cfg.outputs.trajectory_svg, oss.str());
    }
    if (!cfg.outputs.cbf_svg.empty()) {
      std::ostringstream oss;
      rcnav::plot_cbf(log.steps, cfg, oss);
      write_file(cfg.outputs.cbf_svg, oss.str());
    }
    if (!cfg.outputs.controls_svg.empty()) {
      std::ostringstream oss;
      rcnav::plot_controls(log.steps, oss, &cfg);
      write_file(cfg.outputs.controls_svg, oss.str());
    }
  }

  double min_h = std::numeric_limits<double>::infinity();
  double solve_ms_sum = 0.0;
  long solved = 0;
  for (const rcnav::StepRecord& r : log.steps) {
    min_h = std::min(min_h, r.min_h);
    if (r.qp_status != rcnav::StepStatus::None) {
      solve_ms_sum += r.solve_ms;
      ++solved;
    }
  }
  std::cout << "terminal: " << rcnav::to_string(log.terminal) << "\n"
            << "steps: " << solved << "\n"
            << "min_h: " << rcnav::format_double(min_h) << "\n"
            << "mean_solve_ms: "
            << rcnav::format_double(solved > 0 ? solve_ms_sum / static_cast<double>(solved) : 0.0)
            << "\n";
  return log.terminal == rcnav::TerminalReason::GoalReached ? 0 : 1;
}

int cmd_plot(const std::string& csv_path, const std::string& kind, const std::string& out_path,
             const std::string& scenario_path) {
  std::ifstream in(csv_path);
  if (!in) {
    throw std::runtime_error("cannot open CSV file " + csv_path);
  }
  const std::vector<rcnav::StepRecord> records = rcnav::parse_csv(in);

  std::ostringstream oss;
  if (kind == "trajectory" || kind == "cbf") {
    if (scenario_path.empty()) {
      throw std::runtime_error("--scenario is required for kind '" + kind + "'");
    }
    const rcnav::ScenarioConfig cfg = rcnav::load_scenario(scenario_path);
    if (kind == "trajectory") {
      rcnav::plot_trajectory(records, cfg, oss);
    } else {
      rcnav::plot_cbf(records, cfg, oss);
    }
  } else if (kind == "controls") {
    if (!scenario_path.empty()) {
      const rcnav::ScenarioConfig cfg = rcnav::load_scenario(scenario_path);
      rcnav::plot_controls(records, oss, &cfg);
    } else {
      rcnav::plot_controls(records, oss);
    }
  } else {
    throw std::runtime_error("--kind must be trajectory, cbf, or controls");
  }
  write_file(out_path, oss.str());
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_check(const std::string& path) {
  const rcnav::ScenarioConfig cfg = rcnav::load_scenario(path);
  std::cout << "OK: " << (cfg.name.empty() ? path : cfg.name) << "\n"
            << "model: "
            << (cfg.robot.model == rcnav::RobotModel::Unicycle ? "unicycle" : "single_integrator")
            << "\n"
            << "obstacles: " << cfg.obstacles.size() << "\n"
            << "dt: " << cfg.sim.dt << "  t_max: " << cfg.sim.t_max << "\n";
  return 0;
}

int cmd_bench(const std::string& path, int reps, const std::string& json_path) {
  const rcnav::ScenarioConfig cfg = rcnav::load_scenario(path);
  const rcnav::BenchReport report = rcnav::bench_scenario(cfg, reps);
  std::cout << "bench: " << path << "\n"
            << "reps: " << report.repetitions << "  steps: " << report.steps << "\n"
            << "mean_ms: " << rcnav::format_double(report.mean_ms) << "\n"
            << "median_ms: " << rcnav::format_double(report.median_ms) << "\n"
            << "p95_ms: " << rcnav::format_double(report.p95_ms) << "\n";
  if (!json_path.empty()) {
    std::ostringstream oss;
    oss << "{\"repetitions\":" << report.repetitions << ",\"steps\":" << report.steps
        << ",\"mean_ms\":" << rcnav::format_double(report.mean_ms)
        << ",\"median_ms\":" << rcnav::format_double(report.median_ms)
        << ",\"p95_ms\":" << rcnav::format_double(report.p95_ms) << ",\"per_step_ms\":[";
    for (std::size_t i = 0; i < report.per_step_ms.size(); ++i) {
      oss << (i > 0 ? "," : "") << rcnav::format_double(report.per_step_ms[i]);
    }
    oss << "]}\n";
    write_file(json_path, oss.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safety-critical whole-body navigation simulator"};
  app.require_subcommand(1);

  std::string run_file;
  double run_dt = 0.0;
  double run_tmax = 0.0;
  std::string run_sdf_mode;
  std::string run_csv;
  CLI::App* run = app.add_subcommand("run", "Run a scenario and write its CSV log");
  run->add_option("file", run_file, "scenario file")->required();
  run->add_option("--dt", run_dt, "override sim.dt (s)");
  run->add_option("--tmax", run_tmax, "override sim.t_max (s)");
  run->add_option("--sdf-mode", run_sdf_mode, "override controller.sdf_mode (analytic|grid)");
  run->add_option("--csv", run_csv, "override the CSV output path");

  std::string plot_csv;
  std::string plot_kind;
  std::string plot_out;
  std::string plot_scenario;
  CLI::App* plot = app.add_subcommand("plot", "Render an SVG plot from a CSV log");
  plot->add_option("csv", plot_csv, "CSV log produced by run")->required();
  plot->add_option("--kind", plot_kind, "trajectory|cbf|controls")->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();
  plot->add_option("--scenario", plot_scenario,
                   "scenario file (required for trajectory and cbf)");

  std::string check_file;
  CLI::App* check = app.add_subcommand("check", "Parse and validate a scenario file");
  check->add_option("file", check_file, "scenario file")->required();

  std::string bench_file;
  int bench_reps = 0;
  std::string bench_json;
  CLI::App* bench = app.add_subcommand("bench", "Benchmark per-step controller time");
  bench->add_option("file", bench_file, "scenario file")->required();
  bench->add_option("--reps", bench_reps, "number of repetitions")->required();
  bench->add_option("--json", bench_json, "write a machine-readable report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_file, run_dt, run_tmax, run_sdf_mode, run_csv);
    }
    if (plot->parsed()) {
      return cmd_plot(plot_csv, plot_kind, plot_out, plot_scenario);
    }
    if (check->parsed()) {
      return cmd_check(check_file);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_file, bench_reps, bench_json);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
