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

#include <vector>

#include "tpfc/costs.hpp"
#include "tpfc/dynamics.hpp"
#include "tpfc/gain_schedule.hpp"

namespace tpfc::detail
{

  /// First/second-order data of the problem along a trajectory: dynamics
  /// Jacobians per step plus cost derivatives.
  struct ProblemExpansion
  {
    std::vector<MatrixXd> A, B;
    std::vector<StepCostDerivatives> step;
    TerminalCostDerivatives terminal;
    int horizon() const { return static_cast<int>(A.size()); }
  };

  ProblemExpansion expand_problem(const DynamicsModel &model, const CostModel &cost,
                                  const std::vector<VectorXd> &states,
                                  const std::vector<VectorXd> &controls);

  /// Same, but reusing cached linearizations instead of re-deriving them.
  ProblemExpansion expand_problem(const std::vector<Linearization> &lin, const CostModel &cost,
                                  const std::vector<VectorXd> &states,
                                  const std::vector<VectorXd> &controls);

  /// Result of one value-expansion (iLQG-style) backward pass. The gain
  /// schedule holds the value gradient rows, value Hessians, feedback gains
  /// and unregularized control-space Hessians; `k` is the feedforward step
  /// used by the line search.
  struct ValueExpansionPass
  {
    std::vector<VectorXd> k;
    GainSchedule gains;
    double dv1 = 0.0; // sum of k^T Qu
    double dv2 = 0.0; // sum of 0.5 k^T Quu_reg k
  };

  /// Backward pass with state regularization `mu` and clamped control
  /// minimization against the box [lo, hi] (empty bounds = unconstrained).
  /// Throws NotPositiveDefinite if the regularized control Hessian fails.
  ValueExpansionPass value_backward_pass(const ProblemExpansion &exp,
                                         const std::vector<VectorXd> &controls,
                                         double mu, const VectorXd &lo, const VectorXd &hi);

  /// Projected first-order residual: max_t || grad_u ||_inf with components
  /// whose bound is active and whose gradient points outward removed.
  double projected_residual(const ProblemExpansion &exp, const std::vector<VectorXd> &controls,
                            const VectorXd &lo, const VectorXd &hi);

} // namespace tpfc::detail
