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

#include "tpfc/types.hpp"

namespace tpfc
{

  /// Ellipsoid { p : (p - c)^T E (p - c) <= 1 } with E symmetric positive
  /// definite.
  struct Ellipsoid
  {
    VectorXd center;
    MatrixXd shape;

    Ellipsoid() = default;
    Ellipsoid(VectorXd c, MatrixXd E);

    /// (p - c)^T E (p - c).
    double level(const VectorXd &p) const { return (p - center).dot(shape * (p - center)); }
  };

  /// Smooth obstacle penalty Γ exp(-ρ (p - c)^T E (p - c)) acting on the
  /// position sub-vector of the state selected by `position_selector`.
  struct BarrierObstacle
  {
    Ellipsoid ellipsoid;
    double gamma = 1e3; // cost scale
    double rho = 1.0;   // decay rate
    std::vector<int> position_selector{0, 1};

    BarrierObstacle() = default;
    BarrierObstacle(Ellipsoid e, double gamma_, double rho_, std::vector<int> selector);

    double value(const VectorXd &x) const;
    /// Gradient and Hessian w.r.t. the full state (zero off the selector).
    void add_derivatives(const VectorXd &x, RowVectorXd &grad, MatrixXd &hess) const;
  };

  /// First/second order information of the step cost at a nominal point.
  struct StepCostDerivatives
  {
    RowVectorXd state_grad;  // dl/dx
    MatrixXd state_hess;     // d2l/dx2
    VectorXd control_grad;   // R u
    MatrixXd control_hess;   // R
  };

  struct TerminalCostDerivatives
  {
    double value = 0.0;
    RowVectorXd grad;
    MatrixXd hess;
  };

  /// Step cost l(x) + u^T R u / 2 with l(x) the quadratic distance to the
  /// goal plus exponential obstacle barriers, and terminal cost
  /// (x - goal)^T Q_f (x - goal) / 2. All derivative queries are exact and
  /// the model is immutable after construction.
  class CostModel
  {
  public:
    CostModel(MatrixXd Q, MatrixXd Qf, MatrixXd R, VectorXd goal,
              std::vector<BarrierObstacle> obstacles = {});

    int state_dim() const { return static_cast<int>(goal_.size()); }
    int control_dim() const { return static_cast<int>(R_.rows()); }
    const MatrixXd &Q() const { return Q_; }
    const MatrixXd &Qf() const { return Qf_; }
    const MatrixXd &R() const { return R_; }
    const VectorXd &goal() const { return goal_; }
    const std::vector<BarrierObstacle> &obstacles() const { return obstacles_; }

    double step_cost(const VectorXd &x, const VectorXd &u) const;
    /// State-only part l(x) (used when accumulating cost through a state
    /// without a control attached).
    double state_cost(const VectorXd &x) const;
    StepCostDerivatives step_derivatives(const VectorXd &x, const VectorXd &u) const;

    double terminal_cost(const VectorXd &x) const;
    TerminalCostDerivatives terminal_derivatives(const VectorXd &x) const;

  private:
    void check_state(const VectorXd &x) const;

    MatrixXd Q_, Qf_, R_;
    VectorXd goal_;
    std::vector<BarrierObstacle> obstacles_;
  };

} // namespace tpfc
