/*
 Copyright 2026 The tpfc authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tpfc/diagnostics.hpp"
#include "tpfc/experiment.hpp"
#include "tpfc/gains.hpp"
#include "tpfc/scenario.hpp"

namespace fs = std::filesystem;
using namespace tpfc;

namespace
{

  void write_nominal_csv(const fs::path &path, const NominalTrajectory &traj, double dt)
  {
    std::ofstream out(path);
    out.precision(17);
    const int nx = static_cast<int>(traj.states[0].size());
    const int nu = static_cast<int>(traj.controls.empty() ? 0 : traj.controls[0].size());
    out << "t";
    for (int i = 0; i < nx; ++i)
      out << ",x" << i;
    for (int i = 0; i < nu; ++i)
      out << ",u" << i;
    out << "\n";
    for (size_t t = 0; t < traj.states.size(); ++t)
    {
      out << static_cast<double>(t) * dt;
      for (int i = 0; i < nx; ++i)
        out << ',' << traj.states[t](i);
      for (int i = 0; i < nu; ++i)
      {
        if (t < traj.controls.size())
          out << ',' << traj.controls[t](i);
        else
          out << ',';
      }
      out << "\n";
    }
  }

  void write_report_json(const fs::path &path, const SolveReport &report, double nominal_cost)
  {
    std::ofstream out(path);
    out.precision(17);
    out << "{\n  \"converged\": " << (report.converged ? "true" : "false")
        << ",\n  \"iterations\": " << report.iterations
        << ",\n  \"stationarity\": " << report.stationarity
        << ",\n  \"wall_time_s\": " << report.wall_time_s
        << ",\n  \"nominal_cost\": " << nominal_cost << ",\n  \"cost_trace\": [";
    for (size_t i = 0; i < report.cost_trace.size(); ++i)
      out << (i ? ", " : "") << report.cost_trace[i];
    out << "]\n}\n";
  }

  int cmd_plan(const std::string &source, const std::string &out_dir)
  {
    const Scenario scenario = load_scenario(source);
    ScenarioRuntime runtime(scenario);
    const SimProblem problem = runtime.problem();
    auto [traj, report] = solve_ocp(runtime.model(), runtime.cost(), problem.x0, problem.horizon,
                                    problem.solver, problem.seed_controls);
    fs::create_directories(out_dir);
    write_nominal_csv(fs::path(out_dir) / "nominal.csv", traj, runtime.model().dt());
    write_report_json(fs::path(out_dir) / "solve_report.json", report, traj.total_cost());
    std::cout << scenario.name << ": " << (report.converged ? "converged" : "NOT converged")
              << " in " << report.iterations << " iterations, cost " << traj.total_cost()
              << ", residual " << report.stationarity << ", " << report.wall_time_s << " s\n"
              << "wrote " << (fs::path(out_dir) / "nominal.csv").string() << "\n";
    return report.converged ? 0 : 1;
  }

  int cmd_gains(const std::string &source, const std::string &out_dir)
  {
    const Scenario scenario = load_scenario(source);
    ScenarioRuntime runtime(scenario);
    const SimProblem problem = runtime.problem();
    auto [traj, report] = solve_ocp(runtime.model(), runtime.cost(), problem.x0, problem.horizon,
                                    problem.solver, problem.seed_controls);
    if (!report.converged)
    {
      std::cerr << "nominal solve did not converge (residual " << report.stationarity << ")\n";
      return 1;
    }
    const GainSchedule gains = backward_pass_tpfc(traj, runtime.cost());
    fs::create_directories(out_dir);
    write_nominal_csv(fs::path(out_dir) / "nominal.csv", traj, runtime.model().dt());
    write_gain_bundle(gains, out_dir);
    std::cout << scenario.name << ": wrote G.csv, P.csv, K.csv, S.csv to " << out_dir
              << " (nominal residual " << gains.nominal_residual << ")\n";
    return 0;
  }

  int cmd_rollout(const std::string &source, const std::string &controller, double eps,
                  std::uint64_t seed, const std::string &noise_mode, const std::string &out_dir)
  {
    const Scenario scenario = load_scenario(source);
    ScenarioRuntime runtime(scenario);
    const SimProblem problem = runtime.problem();
    NoiseConfig noise;
    noise.epsilon = eps;
    noise.dt = runtime.model().dt();
    noise.seed = seed;
    noise.mode = noise_mode == "actuator" ? NoiseMode::Actuator
                                          : (noise_mode == "process" ? NoiseMode::Process
                                                                     : scenario.noise_mode);
    const RolloutResult rr =
        run_controller(controller_from_string(controller), problem, noise, scenario.replan);

    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "rollout.csv");
    out.precision(17);
    out << "t";
    for (int i = 0; i < runtime.model().state_dim(); ++i)
      out << ",x" << i;
    for (int i = 0; i < runtime.model().control_dim(); ++i)
      out << ",u" << i;
    out << "\n";
    for (size_t t = 0; t < rr.states.size(); ++t)
    {
      out << static_cast<double>(t) * runtime.model().dt();
      for (int i = 0; i < runtime.model().state_dim(); ++i)
        out << ',' << rr.states[t](i);
      for (int i = 0; i < runtime.model().control_dim(); ++i)
      {
        if (t < rr.controls.size())
          out << ',' << rr.controls[t](i);
        else
          out << ',';
      }
      out << "\n";
    }
    std::cout << rr.controller << " on " << scenario.name << " (eps=" << eps << ", seed=" << seed
              << "): cost " << rr.cost << ", replans " << rr.replan_times.size() << ", plan "
              << rr.plan_s << " s, exec " << rr.exec_s << " s\n"
              << "wrote " << (fs::path(out_dir) / "rollout.csv").string() << "\n";
    return 0;
  }

  int cmd_experiment(const std::string &plan_path, const std::string &out_override, int runs_override,
                     bool fast, const std::string &noise_mode)
  {
    ExperimentPlan plan = load_plan(plan_path);
    if (!out_override.empty())
      plan.out_dir = out_override;
    if (runs_override > 0)
      plan.runs = runs_override;
    if (fast)
      plan.runs = std::min(plan.runs, 20);
    if (noise_mode == "process")
      plan.noise_mode = NoiseMode::Process;
    else if (noise_mode == "actuator")
      plan.noise_mode = NoiseMode::Actuator;

    const ExperimentResult result = run_experiment(plan);
    std::cout << "experiment '" << plan.scenario << "': " << result.summaries.size()
              << " controller(s) completed, " << result.failures.size() << " failed; artifacts in "
              << plan.out_dir << "\n";
    for (const auto &f : result.failures)
      std::cerr << "  FAILED " << f.controller << ": " << f.message << "\n";
    return result.failures.empty() ? 0 : 1;
  }

  int cmd_check(bool fast)
  {
    const int samples = fast ? 25 : 100;
    bool ok = true;
    auto line = [&](const std::string &name, double value, double bound)
    {
      const bool pass = value < bound;
      ok = ok && pass;
      std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << value << " (bound " << bound
                << ")\n";
    };

    CarModel car({}, 0.1);
    TrailerModel trailer({}, 0.1);
    QuadrotorModel quad({}, 0.1);
    line("car4 derivatives vs finite differences", dynamics_derivative_check(car, samples, 42), 1e-4);
    line("trailer6 derivatives vs finite differences",
         dynamics_derivative_check(trailer, samples, 43), 1e-4);
    line("quadrotor12 derivatives vs finite differences",
         dynamics_derivative_check(quad, samples, 44), 1e-4);

    for (const auto &name : scenario_preset_names())
    {
      const Scenario scenario = load_scenario(name);
      ScenarioRuntime runtime(scenario);
      line(name + " cost derivatives vs finite differences",
           cost_derivative_check(runtime.cost(), samples, 45), 1e-4);
      if (fast)
        continue;
      const SimProblem problem = runtime.problem();
      auto [traj, report] = solve_ocp(runtime.model(), runtime.cost(), problem.x0, problem.horizon,
                                      problem.solver, problem.seed_controls);
      line(name + " nominal stationarity residual", report.stationarity,
           scenario.solver.stationarity_tol * 1.0000001);
      line(name + " costate gradient check",
           costate_gradient_check(traj, runtime.model(), runtime.cost()), 1e-3);
    }
    std::cout << (ok ? "all checks passed\n" : "CHECKS FAILED\n");
    return ok ? 0 : 1;
  }

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Perturbation-feedback trajectory optimization and experiment runner"};
  app.require_subcommand(1);

  std::string scenario_arg, out_dir = "out";
  std::string controller = "tpfc", noise_mode;
  double eps = 0.0;
  std::uint64_t seed = 1;
  int runs = 0;
  bool fast = false;

  auto *plan_cmd = app.add_subcommand("plan", "Solve a scenario's nominal open-loop problem");
  plan_cmd->add_option("scenario", scenario_arg, "Scenario file or preset name")->required();
  plan_cmd->add_option("--out", out_dir, "Output directory");

  auto *gains_cmd = app.add_subcommand("gains", "Solve and write the feedback gain schedule");
  gains_cmd->add_option("scenario", scenario_arg, "Scenario file or preset name")->required();
  gains_cmd->add_option("--out", out_dir, "Output directory");

  auto *rollout_cmd = app.add_subcommand("rollout", "Execute one closed-loop rollout");
  rollout_cmd->add_option("scenario", scenario_arg, "Scenario file or preset name")->required();
  rollout_cmd->add_option("--controller", controller, "tpfc|nmpc|tlqr|ilqg")->required();
  rollout_cmd->add_option("--eps", eps, "Noise scale")->required();
  rollout_cmd->add_option("--seed", seed, "Noise seed");
  rollout_cmd->add_option("--noise-mode", noise_mode, "process|actuator");
  rollout_cmd->add_option("--out", out_dir, "Output directory");

  auto *exp_cmd = app.add_subcommand("experiment", "Run a Monte Carlo experiment plan");
  exp_cmd->add_option("plan", scenario_arg, "Experiment plan JSON file")->required();
  std::string exp_out;
  exp_cmd->add_option("--out", exp_out, "Override the output directory");
  exp_cmd->add_option("--runs", runs, "Override the number of runs per epsilon");
  exp_cmd->add_flag("--fast", fast, "Cap runs at 20 (CI-scale)");
  exp_cmd->add_option("--noise-mode", noise_mode, "process|actuator");

  auto *check_cmd = app.add_subcommand("check", "Run derivative/oracle diagnostics");
  check_cmd->add_flag("--fast", fast, "Fewer samples, skip nominal solves");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (plan_cmd->parsed())
      return cmd_plan(scenario_arg, out_dir);
    if (gains_cmd->parsed())
      return cmd_gains(scenario_arg, out_dir);
    if (rollout_cmd->parsed())
      return cmd_rollout(scenario_arg, controller, eps, seed, noise_mode, out_dir);
    if (exp_cmd->parsed())
      return cmd_experiment(scenario_arg, exp_out, runs, fast, noise_mode);
    if (check_cmd->parsed())
      return cmd_check(fast);
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
