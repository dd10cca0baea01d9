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

#include "tpfc/dual.hpp"
#include "tpfc/types.hpp"

namespace tpfc
{

  /// Control-affine continuous-time model xdot = f(x) + g(x) u, discretized
  /// by one explicit Euler step:
  ///
  ///   step(x, u) = x + (f(x) + g(x) u) * dt
  ///
  /// Concrete models implement the drift f and the input matrix g on the
  /// Dual2 scalar type; value, Jacobian and curvature queries all evaluate
  /// the same code with different derivative seeds, so the "analytic"
  /// derivatives are exact (no truncation error) and a map that is linear in
  /// (x, u) produces exactly zero curvature tensors.
  ///
  /// Models are immutable after construction and all queries are pure, so a
  /// single instance may be shared across concurrent rollouts.
  class DynamicsModel
  {
  public:
    DynamicsModel(int state_dim, int control_dim, double dt);
    virtual ~DynamicsModel() = default;

    int state_dim() const { return nx_; }
    int control_dim() const { return nu_; }
    double dt() const { return dt_; }
    virtual std::string id() const = 0;

    /// Continuous-time drift f(x).
    VectorXd drift(const VectorXd &x) const;
    /// Continuous-time input matrix g(x), state_dim x control_dim.
    MatrixXd input_matrix(const VectorXd &x) const;

    /// One Euler step of the discrete map. Throws on dimension mismatch and
    /// on non-finite results (model blow-up).
    VectorXd step(const VectorXd &x, const VectorXd &u) const;

    /// Exact Jacobians and second-derivative tensors of `step` at (x, u).
    Linearization linearize(const VectorXd &x, const VectorXd &u) const;

    /// Jacobians only (cheaper; used in solver inner loops).
    void jacobians(const VectorXd &x, const VectorXd &u, MatrixXd &A, MatrixXd &B) const;

  protected:
    // Both hooks receive `x` as state_dim Dual2 scalars. `g` is a pre-zeroed
    // row-major state_dim*control_dim buffer.
    virtual void eval_drift(const Dual2 *x, Dual2 *f) const = 0;
    virtual void eval_input(const Dual2 *x, Dual2 *g) const = 0;

  private:
    void check_state(const VectorXd &x) const;
    void check_control(const VectorXd &u) const;
    void eval_at(const std::vector<Dual2> &xd, std::vector<Dual2> &f, std::vector<Dual2> &g) const;

    int nx_;
    int nu_;
    double dt_;
  };

  /// Central-difference Jacobians and second differences of `step`, the
  /// independent oracle for `linearize`. Detects a step size small enough
  /// that roundoff dominates (the h, 2h, 4h estimates stop converging) and
  /// reports it as an error instead of returning garbage.
  Linearization fd_derivatives(const DynamicsModel &model, const VectorXd &x,
                               const VectorXd &u, double h);

} // namespace tpfc
