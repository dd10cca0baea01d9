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

#include "tpfc/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

namespace tpfc
{

  namespace
  {
    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
      return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    VectorXd normal_vector(std::mt19937_64 &rng, int n)
    {
      std::normal_distribution<double> gauss(0.0, 1.0);
      VectorXd w(n);
      for (int i = 0; i < n; ++i)
        w(i) = gauss(rng);
      return w;
    }

    void validate_problem(const SimProblem &p, const NoiseConfig &noise)
    {
      if (!p.model || !p.cost)
        throw std::invalid_argument("SimProblem: model and cost must be set");
      if (p.horizon < 1)
        throw std::invalid_argument("SimProblem: horizon must be >= 1");
      if (p.x0.size() != p.model->state_dim())
        throw std::invalid_argument("SimProblem: initial state dimension mismatch");
      if (noise.epsilon < 0.0)
        throw std::invalid_argument("NoiseConfig: epsilon must be nonnegative");
      if (std::abs(noise.dt - p.model->dt()) > 1e-12)
        throw std::invalid_argument("NoiseConfig: dt does not match the model discretization");
    }

    double actuator_sigma(const SimProblem &p, const NoiseConfig &noise)
    {
      if (noise.actuator_scale > 0.0)
        return noise.actuator_scale;
      if (!p.solver.bounded())
        throw std::invalid_argument("actuator noise mode needs control bounds (or an explicit actuator_scale)");
      return std::max(p.solver.u_lower.cwiseAbs().maxCoeff(), p.solver.u_upper.cwiseAbs().maxCoeff());
    }
  } // namespace

  VectorXd disturb(const NoiseConfig &noise, std::mt19937_64 &rng, const VectorXd &x_next)
  {
    if (noise.epsilon == 0.0)
      return x_next;
    return x_next + noise.epsilon * std::sqrt(noise.dt) * normal_vector(rng, static_cast<int>(x_next.size()));
  }

  std::string to_string(ControllerId id)
  {
    switch (id)
    {
    case ControllerId::Tpfc: return "tpfc";
    case ControllerId::Nmpc: return "nmpc";
    case ControllerId::Tlqr: return "tlqr";
    case ControllerId::Ilqg: return "ilqg";
    }
    return "unknown";
  }

  ControllerId controller_from_string(const std::string &name)
  {
    if (name == "tpfc") return ControllerId::Tpfc;
    if (name == "nmpc") return ControllerId::Nmpc;
    if (name == "tlqr") return ControllerId::Tlqr;
    if (name == "ilqg") return ControllerId::Ilqg;
    throw std::invalid_argument("unknown controller '" + name + "' (expected tpfc|nmpc|tlqr|ilqg)");
  }

  Control apply_policy(const NominalTrajectory &traj, const GainSchedule &gains,
                       const VectorXd &x, int t)
  {
    VectorXd u = traj.controls[t] + gains.K[t] * (x - traj.states[t]);
    if (traj.bounded())
      u = u.cwiseMax(traj.u_lower).cwiseMin(traj.u_upper);
    return u;
  }

  double cost_fraction(const NominalTrajectory &traj, double incurred_cost_so_far, int t)
  {
    if (t < 0 || t > traj.horizon())
      throw std::invalid_argument("cost_fraction: step index out of range");
    const double total = traj.total_cost();
    if (!(total > 0.0))
      return 0.0;
    // Prefix-sum the nominal step costs in execution order so that a rollout
    // tracking the nominal exactly yields an exact zero.
    double nominal_so_far = 0.0;
    for (int s = 0; s < t; ++s)
      nominal_so_far += traj.step_costs[s];
    return (incurred_cost_so_far - nominal_so_far) / total;
  }

  namespace
  {

    using GainBuilder = std::function<GainSchedule(const NominalTrajectory &)>;

    RolloutResult run_feedback_loop(const std::string &name, const SimProblem &p,
                                    const NoiseConfig &noise, const ReplanPolicy &replan,
                                    const GainBuilder &build_gains)
    {
      validate_problem(p, noise);
      const auto t_total = Clock::now();
      const int N = p.horizon;
      const int nu = p.model->control_dim();
      const double act_sigma = noise.mode == NoiseMode::Actuator ? actuator_sigma(p, noise) : 0.0;

      RolloutResult rr;
      rr.controller = name;
      rr.seed = noise.seed;
      rr.horizon = N;
      rr.states.reserve(N + 1);
      rr.controls.reserve(N);
      rr.policy_eval_s.reserve(N);

      auto plan_clock = Clock::now();
      auto [traj, report] = solve_ocp(*p.model, *p.cost, p.x0, N, p.solver, p.seed_controls);
      if (!report.converged)
        throw SolverError("initial plan did not converge (residual " +
                              std::to_string(report.stationarity) + ")",
                          report);
      GainSchedule gains = build_gains(traj);
      rr.plan_s += seconds_since(plan_clock);

      std::mt19937_64 rng(noise.seed);
      VectorXd x = p.x0;
      rr.states.push_back(x);
      double incurred_since_plan = 0.0;
      int plan_base = 0;

      for (int t = 0; t < N; ++t)
      {
        int k = t - plan_base;
        // Threshold is inclusive so a (forced) zero threshold replans at
        // every step, mirroring a receding-horizon controller.
        if (replan.enabled && k > 0 && cost_fraction(traj, incurred_since_plan, k) >= replan.c_th)
        {
          plan_clock = Clock::now();
          std::vector<VectorXd> warm(traj.controls.begin() + k, traj.controls.end());
          try
          {
            auto [new_traj, new_report] = solve_ocp(*p.model, *p.cost, x, N - t, p.solver, warm);
            if (!new_report.converged)
              throw SolverError("replan did not converge (residual " +
                                    std::to_string(new_report.stationarity) + ")",
                                new_report);
            traj = std::move(new_traj);
          }
          catch (const std::exception &e)
          {
            rr.exec_s = seconds_since(t_total) - rr.plan_s;
            throw RolloutError(name + ": replan failed at step " + std::to_string(t) + ": " + e.what(),
                               std::move(rr), t);
          }
          gains = build_gains(traj);
          plan_base = t;
          k = 0;
          incurred_since_plan = 0.0;
          rr.replan_times.push_back(t);
          rr.plan_s += seconds_since(plan_clock);
        }

        const auto t_policy = Clock::now();
        const Control u = apply_policy(traj, gains, x, k);
        rr.policy_eval_s.push_back(seconds_since(t_policy));

        const double c = p.cost->step_cost(x, u);
        rr.cost += c;
        incurred_since_plan += c;
        rr.controls.push_back(u);

        if (noise.mode == NoiseMode::Actuator && noise.epsilon > 0.0)
        {
          const VectorXd u_applied = u + noise.epsilon * act_sigma * normal_vector(rng, nu);
          x = p.model->step(x, u_applied);
        }
        else
        {
          x = disturb(noise, rng, p.model->step(x, u));
        }
        rr.states.push_back(x);
      }
      rr.cost += p.cost->terminal_cost(x);
      rr.exec_s = seconds_since(t_total) - rr.plan_s;
      return rr;
    }

  } // namespace

  RolloutResult run_tpfc(const SimProblem &p, const NoiseConfig &noise, const ReplanPolicy &replan)
  {
    return run_feedback_loop("tpfc", p, noise, replan,
                             [&](const NominalTrajectory &traj)
                             { return backward_pass_tpfc(traj, *p.cost); });
  }

  RolloutResult run_tlqr(const SimProblem &p, const NoiseConfig &noise, const ReplanPolicy &replan)
  {
    if (p.tlqr_Q.size() == 0 || p.tlqr_R.size() == 0 || p.tlqr_Qf.size() == 0)
      throw std::invalid_argument("run_tlqr: tracking weights not set on the problem");
    return run_feedback_loop("tlqr", p, noise, replan,
                             [&](const NominalTrajectory &traj)
                             { return backward_pass_tlqr(traj, p.tlqr_Q, p.tlqr_R, p.tlqr_Qf); });
  }

  RolloutResult run_ilqg_feedback(const SimProblem &p, const NoiseConfig &noise,
                                  const ReplanPolicy &replan)
  {
    return run_feedback_loop("ilqg", p, noise, replan,
                             [](const NominalTrajectory &traj)
                             { return ilqg_gains(traj); });
  }

  RolloutResult run_nmpc(const SimProblem &p, const NoiseConfig &noise)
  {
    validate_problem(p, noise);
    const auto t_total = Clock::now();
    const int N = p.horizon;
    const int nu = p.model->control_dim();
    const double act_sigma = noise.mode == NoiseMode::Actuator ? actuator_sigma(p, noise) : 0.0;

    RolloutResult rr;
    rr.controller = "nmpc";
    rr.seed = noise.seed;
    rr.horizon = N;
    rr.states.reserve(N + 1);
    rr.controls.reserve(N);
    rr.policy_eval_s.reserve(N);

    std::mt19937_64 rng(noise.seed);
    VectorXd x = p.x0;
    rr.states.push_back(x);
    std::vector<VectorXd> warm = p.seed_controls;

    for (int t = 0; t < N; ++t)
    {
      // Shrinking prediction horizon: solve to the end from the current
      // state, warm-started by the previous solution shifted one step.
      const auto t_solve = Clock::now();
      NominalTrajectory traj;
      try
      {
        auto [new_traj, report] = solve_ocp(*p.model, *p.cost, x, N - t, p.solver, warm);
        if (!report.converged)
          throw SolverError("solve did not converge (residual " +
                                std::to_string(report.stationarity) + ")",
                            report);
        traj = std::move(new_traj);
      }
      catch (const std::exception &e)
      {
        rr.exec_s = seconds_since(t_total) - rr.plan_s;
        throw RolloutError("nmpc: optimizer failed at step " + std::to_string(t) + ": " + e.what(),
                           std::move(rr), t);
      }
      const double solve_s = seconds_since(t_solve);
      rr.plan_s += solve_s;
      rr.policy_eval_s.push_back(solve_s);
      if (t > 0)
        rr.replan_times.push_back(t);

      const Control u = traj.controls.front();
      rr.cost += p.cost->step_cost(x, u);
      rr.controls.push_back(u);
      warm.assign(traj.controls.begin() + 1, traj.controls.end());

      if (noise.mode == NoiseMode::Actuator && noise.epsilon > 0.0)
      {
        const VectorXd u_applied = u + noise.epsilon * act_sigma * normal_vector(rng, nu);
        x = p.model->step(x, u_applied);
      }
      else
      {
        x = disturb(noise, rng, p.model->step(x, u));
      }
      rr.states.push_back(x);
    }
    rr.cost += p.cost->terminal_cost(x);
    rr.exec_s = seconds_since(t_total) - rr.plan_s;
    return rr;
  }

  RolloutResult run_controller(ControllerId id, const SimProblem &p, const NoiseConfig &noise,
                               const ReplanPolicy &replan)
  {
    switch (id)
    {
    case ControllerId::Tpfc: return run_tpfc(p, noise, replan);
    case ControllerId::Nmpc: return run_nmpc(p, noise);
    case ControllerId::Tlqr: return run_tlqr(p, noise, replan);
    case ControllerId::Ilqg: return run_ilqg_feedback(p, noise, replan);
    }
    throw std::invalid_argument("run_controller: bad controller id");
  }

  namespace
  {
    int thread_count(int requested, size_t jobs)
    {
      int n = requested;
      if (n <= 0)
      {
        if (const char *env = std::getenv("TPFC_THREADS"))
          n = std::atoi(env);
      }
      if (n <= 0)
        n = static_cast<int>(std::thread::hardware_concurrency());
      if (n <= 0)
        n = 1;
      return static_cast<int>(std::min<size_t>(n, jobs));
    }
  } // namespace

  MonteCarloSummary monte_carlo(ControllerId id, const SimProblem &problem,
                                const std::vector<double> &eps_grid, int runs,
                                std::uint64_t base_seed, const ReplanPolicy &replan,
                                NoiseMode mode, int threads)
  {
    if (runs < 1)
      throw std::invalid_argument("monte_carlo: runs must be >= 1");
    for (double eps : eps_grid)
      if (eps < 0.0)
        throw std::invalid_argument("monte_carlo: epsilon grid must be nonnegative");

    MonteCarloSummary summary;
    summary.controller = to_string(id);
    summary.base_seed = base_seed;
    summary.runs = runs;
    summary.rows.resize(eps_grid.size());

    const size_t jobs = eps_grid.size() * static_cast<size_t>(runs);
    std::vector<RolloutResult> results(jobs);
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<size_t> next{0};

    auto worker = [&]()
    {
      while (true)
      {
        const size_t j = next.fetch_add(1);
        if (j >= jobs)
          return;
        const size_t e = j / runs;
        const int r = static_cast<int>(j % runs);
        NoiseConfig noise;
        noise.epsilon = eps_grid[e];
        noise.dt = problem.model->dt();
        noise.seed = base_seed + static_cast<std::uint64_t>(r);
        noise.mode = mode;
        try
        {
          results[j] = run_controller(id, problem, noise, replan);
        }
        catch (...)
        {
          errors[j] = std::current_exception();
        }
      }
    };

    const int n_threads = thread_count(threads, jobs);
    if (n_threads <= 1)
    {
      worker();
    }
    else
    {
      std::vector<std::thread> pool;
      pool.reserve(n_threads);
      for (int i = 0; i < n_threads; ++i)
        pool.emplace_back(worker);
      for (auto &th : pool)
        th.join();
    }

    // Deterministic merge in (epsilon, seed) order; first failure wins.
    for (size_t j = 0; j < jobs; ++j)
    {
      if (errors[j])
      {
        const size_t e = j / runs;
        const std::uint64_t seed = base_seed + j % runs;
        try
        {
          std::rethrow_exception(errors[j]);
        }
        catch (const std::exception &ex)
        {
          throw std::runtime_error("monte_carlo: rollout failed (controller=" + summary.controller +
                                   ", eps=" + std::to_string(eps_grid[e]) +
                                   ", seed=" + std::to_string(seed) + "): " + ex.what());
        }
      }
    }

    for (size_t e = 0; e < eps_grid.size(); ++e)
    {
      auto &row = summary.rows[e];
      row.epsilon = eps_grid[e];
      row.per_run.reserve(runs);
      double sum = 0.0;
      for (int r = 0; r < runs; ++r)
      {
        const RolloutResult &rr = results[e * runs + r];
        row.per_run.push_back({rr.seed, rr.cost, static_cast<int>(rr.replan_times.size()),
                               rr.plan_s, rr.exec_s});
        sum += rr.cost;
        row.mean_replans += static_cast<double>(rr.replan_times.size());
        row.plan_s += rr.plan_s;
        row.exec_s += rr.exec_s;
        if (row.mean_controls.empty())
          row.mean_controls.assign(rr.controls.begin(), rr.controls.end());
        else
          for (size_t t = 0; t < rr.controls.size(); ++t)
            row.mean_controls[t] += rr.controls[t];
      }
      row.mean_cost = sum / runs;
      row.mean_replans /= runs;
      row.total_s = row.plan_s + row.exec_s;
      for (auto &u : row.mean_controls)
        u /= static_cast<double>(runs);
      if (runs > 1)
      {
        double ss = 0.0;
        for (const auto &rec : row.per_run)
          ss += (rec.cost - row.mean_cost) * (rec.cost - row.mean_cost);
        row.std_cost = std::sqrt(ss / (runs - 1));
      }
    }
    return summary;
  }

} // namespace tpfc
