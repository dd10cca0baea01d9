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

#include "tpfc/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpfc/plot.hpp"
#include <json.hpp>

namespace tpfc
{

  namespace
  {
    using nlohmann::json;
    namespace fs = std::filesystem;
  } // namespace

  void ExperimentPlan::validate() const
  {
    if (scenario.empty())
      throw std::invalid_argument("experiment plan: scenario must be set");
    if (controllers.empty())
      throw std::invalid_argument("experiment plan: at least one controller required");
    if (runs < 1)
      throw std::invalid_argument("experiment plan: runs must be >= 1");
    if (eps_grid.empty())
      throw std::invalid_argument("experiment plan: epsilon grid must be non-empty");
    for (size_t i = 0; i < eps_grid.size(); ++i)
    {
      if (eps_grid[i] < 0.0)
        throw std::invalid_argument("experiment plan: epsilon grid must be nonnegative");
      if (i > 0 && eps_grid[i] <= eps_grid[i - 1])
        throw std::invalid_argument("experiment plan: epsilon grid must be ascending");
    }
  }

  ExperimentPlan plan_from_json_text(const std::string &text)
  {
    json j;
    try
    {
      j = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
      throw std::invalid_argument(std::string("experiment plan: JSON parse error: ") + e.what());
    }
    ExperimentPlan plan;
    if (!j.contains("scenario"))
      throw std::invalid_argument("experiment plan: field 'scenario': missing");
    plan.scenario = j.at("scenario").get<std::string>();
    if (j.contains("controllers"))
    {
      plan.controllers.clear();
      for (const auto &c : j.at("controllers"))
        plan.controllers.push_back(controller_from_string(c.get<std::string>()));
    }
    if (j.contains("eps_grid"))
      plan.eps_grid = j.at("eps_grid").get<std::vector<double>>();
    plan.runs = j.value("runs", plan.runs);
    plan.base_seed = j.value("base_seed", plan.base_seed);
    plan.out_dir = j.value("out_dir", plan.out_dir);
    plan.threads = j.value("threads", plan.threads);
    if (j.contains("noise_mode"))
    {
      const std::string mode = j.at("noise_mode").get<std::string>();
      if (mode == "process")
        plan.noise_mode = NoiseMode::Process;
      else if (mode == "actuator")
        plan.noise_mode = NoiseMode::Actuator;
      else
        throw std::invalid_argument("experiment plan: noise_mode must be 'process' or 'actuator'");
    }
    plan.validate();
    return plan;
  }

  ExperimentPlan load_plan(const std::string &path)
  {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("load_plan: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return plan_from_json_text(buffer.str());
  }

  std::string plan_to_json_text(const ExperimentPlan &plan, int indent)
  {
    json j;
    j["scenario"] = plan.scenario;
    json cs = json::array();
    for (auto c : plan.controllers)
      cs.push_back(to_string(c));
    j["controllers"] = cs;
    j["eps_grid"] = plan.eps_grid;
    j["runs"] = plan.runs;
    j["base_seed"] = plan.base_seed;
    j["out_dir"] = plan.out_dir;
    if (plan.noise_mode)
      j["noise_mode"] = *plan.noise_mode == NoiseMode::Process ? "process" : "actuator";
    if (plan.threads > 0)
      j["threads"] = plan.threads;
    return j.dump(indent);
  }

  ExperimentResult run_experiment(const ExperimentPlan &plan)
  {
    plan.validate();
    const Scenario scenario = load_scenario(plan.scenario);
    ScenarioRuntime runtime(scenario);
    const SimProblem problem = runtime.problem();
    const NoiseMode mode = plan.noise_mode.value_or(scenario.noise_mode);

    fs::create_directories(plan.out_dir);
    ExperimentResult result;
    auto artifact = [&](const std::string &name)
    {
      result.artifacts.push_back(name);
      return (fs::path(plan.out_dir) / name).string();
    };

    // One reference solve for the nominal cost and the control-trace figure.
    auto [nominal, report] = solve_ocp(*problem.model, *problem.cost, problem.x0, problem.horizon,
                                       problem.solver, problem.seed_controls);
    result.nominal_cost = nominal.total_cost();

    std::ofstream csv(artifact("runs.csv"));
    csv << "controller,eps,seed,cost,replans,plan_ms,exec_ms\n";
    csv.precision(17);

    json summary;
    summary["scenario"] = scenario.name;
    summary["runs"] = plan.runs;
    summary["base_seed"] = plan.base_seed;
    summary["eps_grid"] = plan.eps_grid;
    summary["nominal_cost"] = result.nominal_cost;
    summary["noise_mode"] = mode == NoiseMode::Process ? "process" : "actuator";
    summary["controllers"] = json::object();

    for (ControllerId id : plan.controllers)
    {
      const std::string name = to_string(id);
      try
      {
        MonteCarloSummary mc = monte_carlo(id, problem, plan.eps_grid, plan.runs, plan.base_seed,
                                           scenario.replan, mode, plan.threads);
        for (const auto &row : mc.rows)
          for (const auto &rec : row.per_run)
            csv << name << ',' << row.epsilon << ',' << rec.seed << ',' << rec.cost << ','
                << rec.replans << ',' << rec.plan_s * 1e3 << ',' << rec.exec_s * 1e3 << '\n';
        json rows = json::array();
        for (const auto &row : mc.rows)
          rows.push_back({{"eps", row.epsilon},
                          {"mean_cost", row.mean_cost},
                          {"std_cost", row.std_cost},
                          {"mean_replans", row.mean_replans},
                          {"plan_s", row.plan_s},
                          {"exec_s", row.exec_s},
                          {"total_s", row.total_s}});
        summary["controllers"][name] = {{"rows", std::move(rows)}};
        result.summaries.push_back(std::move(mc));
      }
      catch (const std::exception &e)
      {
        result.failures.push_back({name, e.what()});
      }
    }
    csv.close();

    {
      std::ofstream out(artifact("summary.json"));
      out << summary.dump(2) << '\n';
    }

    // Figures from whatever completed.
    if (!result.summaries.empty())
    {
      std::vector<Series> cost_series, replan_series;
      for (const auto &mc : result.summaries)
      {
        Series cs{mc.controller, {}, {}}, rs{mc.controller, {}, {}};
        for (const auto &row : mc.rows)
        {
          cs.x.push_back(row.epsilon);
          cs.y.push_back(row.mean_cost);
          rs.x.push_back(row.epsilon);
          rs.y.push_back(row.mean_replans);
        }
        cost_series.push_back(std::move(cs));
        replan_series.push_back(std::move(rs));
      }
      emit_plot(artifact("cost_vs_eps.svg"), "Mean incurred cost vs noise level (" + scenario.name + ")",
                "ε", "mean cost", cost_series, PlotKind::Line);
      emit_plot(artifact("replans.svg"), "Mean replanning count vs noise level (" + scenario.name + ")",
                "ε", "mean replans", replan_series, PlotKind::Bars);

      const double dt = problem.model->dt();
      for (const auto &mc : result.summaries)
      {
        if (mc.rows.empty() || mc.rows.back().mean_controls.empty())
          continue;
        const auto &row = mc.rows.back(); // largest epsilon
        std::vector<Series> traces;
        const int nu = problem.model->control_dim();
        for (int c = 0; c < nu; ++c)
        {
          Series nom{"nominal u" + std::to_string(c), {}, {}};
          Series avg{"mean total u" + std::to_string(c), {}, {}};
          for (size_t t = 0; t < nominal.controls.size(); ++t)
          {
            nom.x.push_back(static_cast<double>(t) * dt);
            nom.y.push_back(nominal.controls[t](c));
            avg.x.push_back(static_cast<double>(t) * dt);
            avg.y.push_back(row.mean_controls[t](c));
          }
          traces.push_back(std::move(nom));
          traces.push_back(std::move(avg));
        }
        emit_plot(artifact("controls_" + mc.controller + ".svg"),
                  mc.controller + " control traces at ε=" + std::to_string(row.epsilon).substr(0, 4),
                  "time [s]", "control", traces, PlotKind::Line);
      }
    }

    // Manifest last so it reflects everything written.
    {
      json manifest;
      manifest["artifacts"] = result.artifacts;
      json fails = json::array();
      for (const auto &f : result.failures)
        fails.push_back({{"controller", f.controller}, {"message", f.message}});
      manifest["failures"] = std::move(fails);
      std::ofstream out(artifact("manifest.json"));
      out << manifest.dump(2) << '\n';
    }
    return result;
  }

} // namespace tpfc
