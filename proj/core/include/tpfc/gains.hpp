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
#include "tpfc/trajectory.hpp"

namespace tpfc
{

  /// Decoupled backward pass over an optimal nominal. With terminal
  /// conditions G_N, P_N from the terminal cost derivatives, it propagates
  ///
  ///   G_t = L_t + G_{t+1} A_t
  ///   S_t = R + B_t^T P_{t+1} B_t
  ///   K_t = -S_t^-1 (B_t^T P_{t+1} A_t + (G_{t+1} ⊗ rxu_t)^T)
  ///   P_t = L_tt + A_t^T P_{t+1} A_t - K_t^T S_t K_t + G_{t+1} ⊗ rxx_t
  ///
  /// where ⊗ contracts the costate row against the curvature tensors of the
  /// discrete dynamics map. P_t is re-symmetrized after every step. The
  /// recursion presumes a first-order stationary nominal; the residual is
  /// measured and recorded on the returned schedule (nominal_stationary is
  /// cleared when it exceeds `stationarity_warn_tol`), but the pass still
  /// runs. S_t failing positive definiteness is an error naming t.
  GainSchedule backward_pass_tpfc(const NominalTrajectory &traj, const CostModel &cost,
                                  double stationarity_warn_tol = 1e-4);

  /// Time-varying LQR tracking gains about the nominal's linearization with
  /// separately chosen weights; no curvature tensors and no costate
  /// coupling. The G rows of the returned schedule are zero.
  GainSchedule backward_pass_tlqr(const NominalTrajectory &traj, const MatrixXd &Q,
                                  const MatrixXd &R, const MatrixXd &Qf);

  /// The solver's final-iteration value-expansion gains, cached on
  /// trajectories produced by solve_ocp. Throws when the trajectory carries
  /// no such cache.
  GainSchedule ilqg_gains(const NominalTrajectory &traj);

  /// Oracle check of the costate rows: with the controls frozen, the
  /// central finite difference of the suffix cost w.r.t. the state at time t
  /// must match G_t (the frozen-control adjoint follows the same recursion).
  /// Probes every t with `directions` random unit directions and returns the
  /// worst relative error.
  double costate_gradient_check(const NominalTrajectory &traj, const DynamicsModel &model,
                                const CostModel &cost, double h = 1e-5, int directions = 5,
                                unsigned seed = 1234);

} // namespace tpfc
