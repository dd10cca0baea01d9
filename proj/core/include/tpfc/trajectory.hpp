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

#pragma once

#include <limits>
#include <string>
#include <vector>

#include "tpfc/gain_schedule.hpp"
#include "tpfc/types.hpp"

namespace tpfc
{

  /// Noise-free state/control sequence solving (or seeding) the open-loop
  /// problem, together with the per-step linearizations and cost bookkeeping
  /// the downstream passes need. `states[t+1]` is exactly the model step of
  /// (states[t], controls[t]).
  struct NominalTrajectory
  {
    std::vector<VectorXd> states;     // N+1
    std::vector<VectorXd> controls;   // N
    std::vector<Linearization> lin;   // N, with curvature tensors
    std::vector<double> step_costs;   // N, step cost along the nominal
    std::vector<double> cost_to_go;   // N+1, suffix sums incl. terminal cost
    VectorXd u_lower, u_upper;        // box bounds active during the solve (empty = unbounded)

    // Value-expansion feedback gains from the solver's final backward pass
    // (recomputed unregularized at the solution); empty unless the
    // trajectory came out of solve_ocp.
    GainSchedule solver_gains;
    bool has_solver_gains = false;

    int horizon() const { return static_cast<int>(controls.size()); }
    double total_cost() const { return cost_to_go.empty() ? 0.0 : cost_to_go.front(); }
    bool bounded() const { return u_lower.size() > 0; }
  };

  /// Iteration record of an open-loop solve.
  struct SolveReport
  {
    int iterations = 0;
    double stationarity = std::numeric_limits<double>::infinity();
    std::vector<double> cost_trace; // cost after each accepted iterate (index 0 = seed)
    bool converged = false;
    double wall_time_s = 0.0;
    std::string message;
  };

  struct SolverConfig
  {
    int max_iterations = 300;
    double stationarity_tol = 1e-7;

    // Levenberg-style state regularization schedule.
    double reg_init = 1e-6;
    double reg_increase = 10.0;
    double reg_decrease = 0.5;
    double reg_min = 1e-9;
    double reg_max = 1e10;

    // Backtracking line search.
    double ls_backtrack = 0.5;
    double ls_min_step = 1e-3;
    double ls_accept_ratio = 1e-4;

    // Componentwise control bounds; leave empty for an unbounded problem.
    VectorXd u_lower, u_upper;

    bool bounded() const { return u_lower.size() > 0; }
    void validate(int control_dim) const;
  };

} // namespace tpfc
