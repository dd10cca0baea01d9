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

#include <stdexcept>
#include <utility>

#include "tpfc/costs.hpp"
#include "tpfc/dynamics.hpp"
#include "tpfc/trajectory.hpp"

namespace tpfc
{

  /// Hard solver failure (line search stalled with regularization
  /// exhausted, or a replan blew up); carries the report of the attempt.
  class SolverError : public std::runtime_error
  {
  public:
    SolverError(const std::string &what, SolveReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const SolveReport &report() const { return report_; }

  private:
    SolveReport report_;
  };

  /// Deterministic rollout of a control sequence through the model.
  std::vector<VectorXd> forward_rollout(const DynamicsModel &model, const VectorXd &x0,
                                        const std::vector<VectorXd> &controls);

  /// Builds a fully populated nominal (rollout, linearizations with
  /// curvature tensors, per-step costs and cost-to-go) from a given control
  /// sequence. Does not mark solver gains.
  NominalTrajectory make_nominal(const DynamicsModel &model, const CostModel &cost,
                                 const VectorXd &x0, const std::vector<VectorXd> &controls,
                                 const VectorXd &u_lower = VectorXd(),
                                 const VectorXd &u_upper = VectorXd());

  /// Solves the deterministic open-loop problem
  ///
  ///   min_u  C_N(x_N) + sum_t C_t(x_t, u_t)   s.t.  x_{t+1} = step(x_t, u_t),
  ///          u_lower <= u_t <= u_upper
  ///
  /// by iterated value expansion (regularized backward pass with clamped
  /// control minimization, backtracking forward pass). Convergence is
  /// declared on the projected first-order residual
  /// max_t || R u_t + B_t^T G_{t+1}^T ||_inf (bound-active components with an
  /// outward-pointing gradient removed) falling below the configured
  /// tolerance. If the iteration budget runs out the best iterate is
  /// returned with converged=false; an exhausted regularization schedule
  /// throws SolverError.
  std::pair<NominalTrajectory, SolveReport> solve_ocp(const DynamicsModel &model,
                                                      const CostModel &cost,
                                                      const VectorXd &x0, int horizon,
                                                      const SolverConfig &config,
                                                      const std::vector<VectorXd> &seed_controls = {});

  /// Projected first-order residual of a feasible trajectory, computed from
  /// a backward costate recursion over the cached linearizations.
  double stationarity_residual(const NominalTrajectory &traj, const DynamicsModel &model,
                               const CostModel &cost);

  /// Total cost of a feasible (states, controls) pair.
  double trajectory_cost(const CostModel &cost, const std::vector<VectorXd> &states,
                         const std::vector<VectorXd> &controls);

} // namespace tpfc
