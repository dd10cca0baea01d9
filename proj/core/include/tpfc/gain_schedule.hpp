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

#include <string>
#include <vector>

#include "tpfc/types.hpp"

namespace tpfc
{

  /// Backward-pass products along a nominal trajectory: the first-order
  /// cost-to-go rows G_t and the second-order matrices P_t (N+1 each), the
  /// feedback gains K_t and the control-space Hessians S_t = R + B^T P B
  /// (N each).
  struct GainSchedule
  {
    std::vector<RowVectorXd> G;
    std::vector<MatrixXd> P;
    std::vector<MatrixXd> K;
    std::vector<MatrixXd> S;

    // Stationarity of the nominal the schedule was built on, recorded by the
    // perturbation-feedback pass (zero/true for passes that do not check).
    double nominal_residual = 0.0;
    bool nominal_stationary = true;

    int horizon() const { return static_cast<int>(K.size()); }
  };

  /// Writes G.csv, P.csv, K.csv and S.csv under `directory` (created if
  /// missing), one row per time step with entries flattened row-major.
  void write_gain_bundle(const GainSchedule &gains, const std::string &directory);

} // namespace tpfc
