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

#include "tpfc/costs.hpp"
#include "tpfc/dynamics.hpp"

namespace tpfc
{

  /// Worst relative disagreement between the model's exact derivatives
  /// (A, B and both curvature tensors) and central finite differences of
  /// `step`, over `samples` random (x, u) points. States and controls are
  /// drawn uniformly from [-1, 1] per component.
  double dynamics_derivative_check(const DynamicsModel &model, int samples, unsigned seed,
                                   double h = 1e-4);

  /// Worst relative disagreement between the analytic cost derivatives
  /// (state gradient/Hessian of the step cost, terminal gradient/Hessian)
  /// and central finite differences, over `samples` random states drawn from
  /// a box spanning the goal and all obstacle centers.
  double cost_derivative_check(const CostModel &cost, int samples, unsigned seed,
                               double h = 1e-4);

} // namespace tpfc
