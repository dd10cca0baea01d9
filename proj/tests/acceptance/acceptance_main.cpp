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

// End-to-end acceptance suite. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any fail. The car study
// (criteria 5-9) reuses one set of common-random-number Monte Carlo runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "oracles.hpp"
#include "tpfc/diagnostics.hpp"
#include "tpfc/gains.hpp"
#include "tpfc/scenario.hpp"

using namespace tpfc;

namespace
{
  int failures = 0;

  void report(int id, bool pass, const std::string &name, const std::string &detail)
  {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass)
      ++failures;
  }

  double now_s()
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  }

  std::string fmt(double v)
  {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
  }

  struct PresetSolve
  {
    Scenario scenario;
    std::unique_ptr<ScenarioRuntime> runtime;
    SimProblem problem;
    NominalTrajectory traj;
    SolveReport report;
  };

  PresetSolve solve_preset(const std::string &name)
  {
    PresetSolve ps;
    ps.scenario = load_scenario(name);
    ps.runtime = std::make_unique<ScenarioRuntime>(ps.scenario);
    ps.problem = ps.runtime->problem();
    auto [traj, rep] = solve_ocp(ps.runtime->model(), ps.runtime->cost(), ps.problem.x0,
                                 ps.problem.horizon, ps.problem.solver, ps.problem.seed_controls);
    ps.traj = std::move(traj);
    ps.report = rep;
    return ps;
  }

  double max_gain_diff(const GainSchedule &a, const GainSchedule &b)
  {
    double m = 0.0;
    for (size_t t = 0; t < a.K.size(); ++t)
      m = std::max(m, (a.K[t] - b.K[t]).norm());
    return m;
  }
} // namespace

int main()
{
  // ---------------------------------------------------------- criterion 1
  // LQ equivalence against an independently coded Riccati recursion.
  double lq_coincidence = std::numeric_limits<double>::infinity();
  {
    const double t0 = now_s();
    auto prob = oracles::random_lq(4, 2, 50, 20260810);
    const auto oracle = oracles::solve_lq(prob.Ad, prob.Bd, prob.cost->Q(), prob.cost->R(),
                                          prob.cost->Qf(), prob.cost->goal(), prob.x0, prob.horizon);
    SolverConfig cfg;
    cfg.stationarity_tol = 1e-11;
    auto [traj, rep] = solve_ocp(*prob.model, *prob.cost, prob.x0, prob.horizon, cfg);
    double worst = 0.0;
    for (int t = 0; t < prob.horizon; ++t)
    {
      worst = std::max(worst, (traj.controls[t] - oracle.controls[t]).cwiseAbs().maxCoeff());
      worst = std::max(worst, (traj.states[t + 1] - oracle.states[t + 1]).cwiseAbs().maxCoeff());
    }
    const GainSchedule tpfc = backward_pass_tpfc(traj, *prob.cost);
    const GainSchedule tlqr =
        backward_pass_tlqr(traj, prob.cost->Q(), prob.cost->R(), prob.cost->Qf());
    const GainSchedule ilqg = ilqg_gains(traj);
    double worst_gain = 0.0;
    for (int t = 0; t < prob.horizon; ++t)
      worst_gain = std::max(worst_gain, (tpfc.K[t] - oracle.K[t]).cwiseAbs().maxCoeff());
    lq_coincidence = std::max(max_gain_diff(tpfc, tlqr), max_gain_diff(tpfc, ilqg));
    const double elapsed = now_s() - t0;
    report(1, rep.converged && worst < 1e-8 && worst_gain < 1e-8 && elapsed < 1.0,
           "LQ equivalence with the Riccati oracle",
           "traj err " + fmt(worst) + ", gain err " + fmt(worst_gain) + ", " + fmt(elapsed) + " s");
  }

  // ---------------------------------------------------------- criterion 2
  {
    const double t0 = now_s();
    CarModel car({0.5}, 0.1);
    TrailerModel trailer({0.5}, 0.1);
    QuadrotorModel quad({}, 0.1);
    double worst = 0.0;
    worst = std::max(worst, dynamics_derivative_check(car, 100, 2026));
    worst = std::max(worst, dynamics_derivative_check(trailer, 100, 2027));
    worst = std::max(worst, dynamics_derivative_check(quad, 100, 2028));
    for (const auto &name : scenario_preset_names())
    {
      ScenarioRuntime runtime(load_scenario(name));
      worst = std::max(worst, cost_derivative_check(runtime.cost(), 100, 2029));
    }
    const double elapsed = now_s() - t0;
    report(2, worst < 1e-4 && elapsed < 10.0, "derivative suite vs central finite differences",
           "worst rel err " + fmt(worst) + ", " + fmt(elapsed) + " s");
  }

  // --------------------------------------------------- criteria 3 and 4
  std::vector<PresetSolve> presets;
  {
    bool pass3 = true;
    std::string detail3;
    for (const auto &name : scenario_preset_names())
    {
      presets.push_back(solve_preset(name));
      auto &ps = presets.back();
      const double tol = ps.scenario.model_id == "quadrotor12" ? 1e-4 : 1e-6;
      const double costate = costate_gradient_check(ps.traj, ps.runtime->model(), ps.runtime->cost());
      const bool ok = ps.report.converged && ps.report.stationarity <= tol && costate < 1e-3;
      pass3 = pass3 && ok;
      detail3 += name + " resid " + fmt(ps.report.stationarity) + " costate " + fmt(costate) + "; ";
    }
    report(3, pass3, "stationarity and costate checks on all shipped scenarios", detail3);
  }
  {
    bool pass4 = true;
    std::string detail4;
    for (auto &ps : presets)
    {
      const double nominal = ps.traj.total_cost();
      NoiseConfig zero;
      zero.epsilon = 0.0;
      zero.dt = ps.runtime->model().dt();
      zero.seed = 1;
      for (ControllerId id : {ControllerId::Tpfc, ControllerId::Tlqr, ControllerId::Ilqg,
                              ControllerId::Nmpc})
      {
        const RolloutResult rr = run_controller(id, ps.problem, zero, ps.scenario.replan);
        const double rel = std::abs(rr.cost - nominal) / std::max(1.0, nominal);
        if (rel > 1e-8)
        {
          pass4 = false;
          detail4 += ps.scenario.name + "/" + to_string(id) + " rel " + fmt(rel) + "; ";
        }
      }
    }
    if (pass4)
      detail4 = "all four controllers reproduce every nominal within 1e-8";
    report(4, pass4, "zero-noise invariance on all presets", detail4);
  }

  // -------------------------------------------- the car CRN study (5-9)
  {
    auto &car = presets[0]; // preset names sort car first
    const std::vector<double> grid{0.05, 0.1, 0.15, 0.2, 0.25};
    const std::vector<double> grid_tpfc{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    const int runs = 100;
    const std::uint64_t base_seed = 1;

    const MonteCarloSummary mc_tpfc = monte_carlo(ControllerId::Tpfc, car.problem, grid_tpfc,
                                                  runs, base_seed, car.scenario.replan);
    const MonteCarloSummary mc_nmpc =
        monte_carlo(ControllerId::Nmpc, car.problem, grid, runs, base_seed, car.scenario.replan);
    const MonteCarloSummary mc_tlqr = monte_carlo(ControllerId::Tlqr, car.problem, {0.25}, runs,
                                                  base_seed, car.scenario.replan);

    // Criterion 5: T-PFC within 5% of NMPC on the whole grid; T-LQR worse at 0.25.
    {
      bool pass = true;
      std::string detail;
      for (size_t i = 0; i < grid.size(); ++i)
      {
        const double rel = std::abs(mc_tpfc.rows[i].mean_cost - mc_nmpc.rows[i].mean_cost) /
                           mc_nmpc.rows[i].mean_cost;
        pass = pass && rel <= 0.05;
        detail += "eps " + fmt(grid[i]) + " rel " + fmt(rel) + "; ";
      }
      const bool tlqr_worse = mc_tlqr.rows[0].mean_cost > mc_tpfc.rows[4].mean_cost;
      pass = pass && tlqr_worse;
      detail += std::string("tlqr>tpfc at 0.25: ") + (tlqr_worse ? "yes" : "NO");
      report(5, pass, "T-PFC tracks NMPC within 5%, T-LQR diverges", detail);
    }

    // Criterion 6: replan economy.
    {
      double max_low = 0.0;
      for (size_t i = 0; i < grid.size(); ++i)
        max_low = std::max(max_low, mc_tpfc.rows[i].mean_replans);
      const double at_03 = mc_tpfc.rows[5].mean_replans;
      const double bound = (229.0 - 1.0) / 8.0;
      report(6, max_low == 0.0 && at_03 <= bound, "replan economy on the car preset",
             "mean replans eps<=0.25: " + fmt(max_low) + ", eps=0.3: " + fmt(at_03) + " (bound " +
                 fmt(bound) + "), NMPC by construction: 228");
    }

    // Criterion 7: near-optimality scaling of the T-PFC/NMPC gap.
    {
      const double e[3] = {0.05, 0.1, 0.2};
      double lx[3], ly[3];
      for (int i = 0; i < 3; ++i)
      {
        const size_t gi = i == 0 ? 0 : (i == 1 ? 1 : 3);
        const double delta =
            std::abs(mc_tpfc.rows[gi].mean_cost - mc_nmpc.rows[gi].mean_cost);
        lx[i] = std::log(e[i]);
        ly[i] = std::log(std::max(delta, 1e-300));
      }
      const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
      double num = 0.0, den = 0.0;
      for (int i = 0; i < 3; ++i)
      {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
      }
      const double slope = num / den;
      report(7, slope >= 2.0, "log-log scaling of the T-PFC vs NMPC cost gap",
             "slope " + fmt(slope) + " (need >= 2)");
    }

    // Criterion 8: runtime ratio and per-step policy cost.
    {
      double tpfc_time = 0.0, nmpc_time = 0.0;
      for (size_t i = 0; i < grid.size(); ++i)
      {
        tpfc_time += mc_tpfc.rows[i].total_s;
        nmpc_time += mc_nmpc.rows[i].total_s;
      }
      const double ratio = nmpc_time / tpfc_time;

      auto &quad = presets[1].scenario.model_id == "quadrotor12" ? presets[1] : presets[2];
      NoiseConfig qn;
      qn.epsilon = 0.1;
      qn.dt = quad.runtime->model().dt();
      qn.seed = 3;
      std::vector<double> eval_times;
      for (int s = 0; s < 5; ++s)
      {
        qn.seed = 3 + s;
        const RolloutResult rr = run_tpfc(quad.problem, qn, quad.scenario.replan);
        eval_times.insert(eval_times.end(), rr.policy_eval_s.begin(), rr.policy_eval_s.end());
      }
      std::sort(eval_times.begin(), eval_times.end());
      const double median_eval = eval_times[eval_times.size() / 2];
      report(8, ratio >= 10.0 && median_eval < 10e-6, "NMPC/T-PFC runtime ratio and policy latency",
             "ratio " + fmt(ratio) + "x, quadrotor policy eval median " + fmt(median_eval * 1e6) +
                 " us");
    }

    // Criterion 9: seed-averaged control stays within 1% of the nominal.
    {
      const auto &row = mc_tpfc.rows[4]; // eps = 0.25
      double dev2 = 0.0, nom2 = 0.0;
      for (size_t t = 0; t < car.traj.controls.size(); ++t)
      {
        dev2 += (row.mean_controls[t] - car.traj.controls[t]).squaredNorm();
        nom2 += car.traj.controls[t].squaredNorm();
      }
      const double rel = std::sqrt(dev2 / nom2);
      report(9, rel < 0.01, "seed-averaged control deviation at eps=0.25",
             "relative rms deviation " + fmt(rel) + " (need < 0.01)");
    }

    // Criterion 10: gain distinctness on the car nominal, coincidence on LQ.
    {
      const GainSchedule tpfc = backward_pass_tpfc(car.traj, car.runtime->cost());
      const GainSchedule tlqr = backward_pass_tlqr(car.traj, car.scenario.tlqr_Q,
                                                   car.scenario.tlqr_R, car.scenario.tlqr_Qf);
      const GainSchedule ilqg = ilqg_gains(car.traj);
      const double d_ilqg = max_gain_diff(tpfc, ilqg);
      const double d_tlqr = max_gain_diff(tpfc, tlqr);
      report(10, d_ilqg > 0.0 && d_tlqr > 0.0 && lq_coincidence < 1e-9,
             "gain distinctness (nonlinear) and coincidence (LQ)",
             "|K-K_ilqg| " + fmt(d_ilqg) + ", |K-K_tlqr| " + fmt(d_tlqr) + ", LQ coincidence " +
                 fmt(lq_coincidence));
    }
  }

  if (failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
