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

#include <map>
#include <memory>
#include <string>

#include "tpfc/dynamics.hpp"

namespace tpfc
{

  /// Kinematic car. State (x, y, heading, steering angle), controls
  /// (forward speed, steering rate).
  ///
  ///   xdot = u cos(theta)      thetadot = (u / L) tan(phi)
  ///   ydot = u sin(theta)      phidot   = w
  struct CarParams
  {
    double wheelbase = 0.5; // L, meters
  };

  class CarModel : public DynamicsModel
  {
  public:
    CarModel(const CarParams &params, double dt);
    std::string id() const override { return "car4"; }
    const CarParams &params() const { return params_; }

  protected:
    void eval_drift(const Dual2 *x, Dual2 *f) const override;
    void eval_input(const Dual2 *x, Dual2 *g) const override;

  private:
    CarParams params_;
  };

  /// Kinematic car towing two trailers. State (x, y, heading, steering
  /// angle, trailer1 heading, trailer2 heading); controls as for the car.
  /// Both hitch lengths reuse the wheelbase L:
  ///
  ///   theta1dot = (u / L) sin(theta - theta1)
  ///   theta2dot = (u / L) cos(theta - theta1) sin(theta1 - theta2)
  struct TrailerParams
  {
    double wheelbase = 0.5;
  };

  class TrailerModel : public DynamicsModel
  {
  public:
    TrailerModel(const TrailerParams &params, double dt);
    std::string id() const override { return "trailer6"; }
    const TrailerParams &params() const { return params_; }

  protected:
    void eval_drift(const Dual2 *x, Dual2 *f) const override;
    void eval_input(const Dual2 *x, Dual2 *g) const override;

  private:
    TrailerParams params_;
  };

  /// 12-state quadrotor: position, ZYX Euler angles (roll, pitch, yaw),
  /// world-frame velocity and body rates. The four control channels are
  /// rotor thrust commands mapped to a body wrench (collective z-force,
  /// three body torques) by a fixed linear mixing matrix, which keeps the
  /// model control-affine:
  ///
  ///   pdot   = v
  ///   eulerdot = W(roll, pitch)^-1 * omega
  ///   vdot   = g + (R(euler) F_b - k_d v) / m,  F_b = (0, 0, wrench[0])
  ///   omegadot = I_c^-1 * wrench[1:3]
  ///
  /// The default mixing is the identity, i.e. the command vector is already
  /// the wrench (the paper-style per-rotor map is a configurable parameter).
  struct QuadrotorParams
  {
    double mass = 0.5;    // kg
    double drag = 0.1;    // k_d, linear drag on velocity
    double gravity = 9.81;
    Eigen::Vector3d inertia{5e-3, 5e-3, 9e-3};       // diagonal I_c
    Eigen::Matrix4d mixing = Eigen::Matrix4d::Identity(); // command -> (F_z, tau_x, tau_y, tau_z)
  };

  class QuadrotorModel : public DynamicsModel
  {
  public:
    QuadrotorModel(const QuadrotorParams &params, double dt);
    std::string id() const override { return "quadrotor12"; }
    const QuadrotorParams &params() const { return params_; }

    /// Command vector that balances gravity at level attitude (solves the
    /// mixing matrix for a pure collective force of m*gravity).
    VectorXd hover_command() const;

  protected:
    void eval_drift(const Dual2 *x, Dual2 *f) const override;
    void eval_input(const Dual2 *x, Dual2 *g) const override;

  private:
    QuadrotorParams params_;
  };

  /// Linear time-invariant model xdot = M x + G u, mainly used for
  /// equivalence checks against Riccati solutions.
  class LinearModel : public DynamicsModel
  {
  public:
    LinearModel(MatrixXd drift_matrix, MatrixXd input_matrix, double dt);
    std::string id() const override { return "linear"; }

  protected:
    void eval_drift(const Dual2 *x, Dual2 *f) const override;
    void eval_input(const Dual2 *x, Dual2 *g) const override;

  private:
    MatrixXd M_;
    MatrixXd G_;
  };

  /// Factory keyed by the scenario-config model id ("car4" | "trailer6" |
  /// "quadrotor12"). Scalar parameters come from the `params` map (unknown
  /// keys are rejected); the quadrotor mixing matrix, when customized, is
  /// passed separately.
  std::unique_ptr<DynamicsModel> make_model(const std::string &id,
                                            const std::map<std::string, double> &params,
                                            double dt,
                                            const Eigen::Matrix4d *quad_mixing = nullptr);

} // namespace tpfc
