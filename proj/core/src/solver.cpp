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

#include "tpfc/solver.hpp"

#include <chrono>
#include <cmath>

#include "boxqp.hpp"
#include "value_expansion.hpp"

namespace tpfc
{

  void SolverConfig::validate(int control_dim) const
  {
    if (max_iterations < 1)
      throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
    if (!(stationarity_tol > 0.0))
      throw std::invalid_argument("SolverConfig: stationarity_tol must be positive");
    if (!(reg_init > 0.0) || !(reg_min > 0.0) || !(reg_max > reg_min))
      throw std::invalid_argument("SolverConfig: invalid regularization schedule");
    if (!(ls_backtrack > 0.0 && ls_backtrack < 1.0) || !(ls_min_step > 0.0))
      throw std::invalid_argument("SolverConfig: invalid line-search parameters");
    if (u_lower.size() != u_upper.size())
      throw std::invalid_argument("SolverConfig: bound vectors must have equal size");
    if (bounded())
    {
      if (u_lower.size() != control_dim)
        throw std::invalid_argument("SolverConfig: bound dimension does not match the control dimension");
      if (!((u_lower.array() < u_upper.array()).all()))
        throw std::invalid_argument("SolverConfig: lower bounds must be strictly below upper bounds");
    }
  }

  std::vector<VectorXd> forward_rollout(const DynamicsModel &model, const VectorXd &x0,
                                        const std::vector<VectorXd> &controls)
  {
    std::vector<VectorXd> states;
    states.reserve(controls.size() + 1);
    states.push_back(x0);
    for (const auto &u : controls)
      states.push_back(model.step(states.back(), u));
    return states;
  }

  double trajectory_cost(const CostModel &cost, const std::vector<VectorXd> &states,
                         const std::vector<VectorXd> &controls)
  {
    double total = 0.0;
    for (size_t t = 0; t < controls.size(); ++t)
      total += cost.step_cost(states[t], controls[t]);
    total += cost.terminal_cost(states.back());
    return total;
  }

  NominalTrajectory make_nominal(const DynamicsModel &model, const CostModel &cost,
                                 const VectorXd &x0, const std::vector<VectorXd> &controls,
                                 const VectorXd &u_lower, const VectorXd &u_upper)
  {
    const int N = static_cast<int>(controls.size());
    NominalTrajectory traj;
    traj.controls = controls;
    traj.states = forward_rollout(model, x0, controls);
    traj.u_lower = u_lower;
    traj.u_upper = u_upper;
    traj.lin.resize(N);
    traj.step_costs.resize(N);
    for (int t = 0; t < N; ++t)
    {
      traj.lin[t] = model.linearize(traj.states[t], traj.controls[t]);
      traj.step_costs[t] = cost.step_cost(traj.states[t], traj.controls[t]);
    }
    traj.cost_to_go.assign(N + 1, 0.0);
    traj.cost_to_go[N] = cost.terminal_cost(traj.states[N]);
    for (int t = N - 1; t >= 0; --t)
      traj.cost_to_go[t] = traj.step_costs[t] + traj.cost_to_go[t + 1];
    return traj;
  }

  double stationarity_residual(const NominalTrajectory &traj, const DynamicsModel &model,
                               const CostModel &cost)
  {
    const int N = traj.horizon();
    detail::ProblemExpansion exp =
        static_cast<int>(traj.lin.size()) == N
            ? detail::expand_problem(traj.lin, cost, traj.states, traj.controls)
            : detail::expand_problem(model, cost, traj.states, traj.controls);
    return detail::projected_residual(exp, traj.controls, traj.u_lower, traj.u_upper);
  }

  namespace
  {

    VectorXd clamp(const VectorXd &u, const VectorXd &lo, const VectorXd &hi)
    {
      return lo.size() > 0 ? u.cwiseMax(lo).cwiseMin(hi).eval() : u;
    }

    struct ForwardPassResult
    {
      std::vector<VectorXd> states, controls;
      double cost = std::numeric_limits<double>::infinity();
      bool finite = false;
    };

    ForwardPassResult forward_pass(const DynamicsModel &model, const CostModel &cost,
                                   const std::vector<VectorXd> &xs, const std::vector<VectorXd> &us,
                                   const std::vector<VectorXd> &k, const std::vector<MatrixXd> &K,
                                   double alpha, const VectorXd &lo, const VectorXd &hi)
    {
      const int N = static_cast<int>(us.size());
      ForwardPassResult res;
      res.states.reserve(N + 1);
      res.controls.reserve(N);
      res.states.push_back(xs[0]);
      double total = 0.0;
      for (int t = 0; t < N; ++t)
      {
        VectorXd u = us[t] + alpha * k[t] + K[t] * (res.states.back() - xs[t]);
        u = clamp(u, lo, hi);
        total += cost.step_cost(res.states.back(), u);
        VectorXd next;
        try
        {
          next = model.step(res.states.back(), u);
        }
        catch (const std::runtime_error &)
        {
          return res; // blow-up: infinite cost, rejected by the line search
        }
        res.controls.push_back(std::move(u));
        res.states.push_back(std::move(next));
      }
      total += cost.terminal_cost(res.states.back());
      if (std::isfinite(total))
      {
        res.cost = total;
        res.finite = true;
      }
      return res;
    }

  } // namespace

  std::pair<NominalTrajectory, SolveReport> solve_ocp(const DynamicsModel &model,
                                                      const CostModel &cost,
                                                      const VectorXd &x0, int horizon,
                                                      const SolverConfig &config,
                                                      const std::vector<VectorXd> &seed_controls)
  {
    const auto t_start = std::chrono::steady_clock::now();
    const int N = horizon;
    const int nu = model.control_dim();

    if (N < 1)
      throw std::invalid_argument("solve_ocp: horizon must be >= 1");
    if (x0.size() != model.state_dim() || !x0.allFinite())
      throw std::invalid_argument("solve_ocp: invalid initial state");
    if (cost.state_dim() != model.state_dim() || cost.control_dim() != nu)
      throw std::invalid_argument("solve_ocp: cost/model dimension mismatch");
    config.validate(nu);
    if (!seed_controls.empty() && static_cast<int>(seed_controls.size()) != N)
      throw std::invalid_argument("solve_ocp: seed control sequence must have length N");

    const VectorXd &lo = config.u_lower;
    const VectorXd &hi = config.u_upper;

    std::vector<VectorXd> us(N, VectorXd::Zero(nu));
    if (!seed_controls.empty())
      us = seed_controls;
    for (auto &u : us)
    {
      if (u.size() != nu)
        throw std::invalid_argument("solve_ocp: seed control dimension mismatch");
      u = clamp(u, lo, hi);
    }

    SolveReport report;
    auto finish = [&](NominalTrajectory traj)
    {
      report.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      // Final-iteration value-expansion gains, recomputed without
      // regularization so they do not depend on the path the schedule took.
      try
      {
        detail::ProblemExpansion exp =
            detail::expand_problem(traj.lin, cost, traj.states, traj.controls);
        traj.solver_gains = detail::value_backward_pass(exp, traj.controls, 0.0, lo, hi).gains;
        traj.has_solver_gains = true;
      }
      catch (const detail::NotPositiveDefinite &)
      {
        traj.has_solver_gains = false;
      }
      return std::make_pair(std::move(traj), report);
    };

    std::vector<VectorXd> xs = forward_rollout(model, x0, us);
    double current_cost = trajectory_cost(cost, xs, us);
    report.cost_trace.push_back(current_cost);

    double mu = config.reg_init;
    for (int iter = 0; iter < config.max_iterations; ++iter)
    {
      detail::ProblemExpansion exp = detail::expand_problem(model, cost, xs, us);
      report.stationarity = detail::projected_residual(exp, us, lo, hi);
      if (report.stationarity <= config.stationarity_tol)
      {
        report.converged = true;
        report.message = "converged";
        return finish(make_nominal(model, cost, x0, us, lo, hi));
      }

      report.iterations = iter + 1;

      detail::ValueExpansionPass pass;
      while (true)
      {
        try
        {
          pass = detail::value_backward_pass(exp, us, mu, lo, hi);
          break;
        }
        catch (const detail::NotPositiveDefinite &)
        {
          mu = std::max(config.reg_min, mu * config.reg_increase);
          if (mu > config.reg_max)
          {
            report.message = "regularization exhausted in backward pass";
            throw SolverError("solve_ocp: " + report.message, report);
          }
        }
      }

      bool accepted = false;
      for (double alpha = 1.0; alpha >= config.ls_min_step; alpha *= config.ls_backtrack)
      {
        ForwardPassResult trial =
            forward_pass(model, cost, xs, us, pass.k, pass.gains.K, alpha, lo, hi);
        if (!trial.finite)
          continue;
        const double reduction = current_cost - trial.cost;
        const double expected = -(alpha * pass.dv1 + alpha * alpha * pass.dv2);
        const bool good = expected > 0.0 ? (reduction > config.ls_accept_ratio * expected)
                                         : (reduction > 0.0);
        if (good && reduction > 0.0)
        {
          xs = std::move(trial.states);
          us = std::move(trial.controls);
          current_cost = trial.cost;
          report.cost_trace.push_back(current_cost);
          accepted = true;
          break;
        }
      }

      if (accepted)
      {
        mu = std::max(config.reg_min, mu * config.reg_decrease);
      }
      else
      {
        mu *= config.reg_increase;
        if (mu > config.reg_max)
        {
          report.message = "line search failed with regularization exhausted";
          throw SolverError("solve_ocp: " + report.message, report);
        }
      }
    }

    // Iteration budget exhausted: report the best iterate honestly.
    {
      detail::ProblemExpansion exp = detail::expand_problem(model, cost, xs, us);
      report.stationarity = detail::projected_residual(exp, us, lo, hi);
      report.converged = report.stationarity <= config.stationarity_tol;
      report.message = report.converged ? "converged" : "max iterations reached";
    }
    return finish(make_nominal(model, cost, x0, us, lo, hi));
  }

} // namespace tpfc
