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

#include "tpfc/models.hpp"

#include <set>
#include <stdexcept>

namespace tpfc
{

  namespace
  {
    double param_or(const std::map<std::string, double> &params, const std::string &key, double fallback)
    {
      auto it = params.find(key);
      return it == params.end() ? fallback : it->second;
    }

    void reject_unknown(const std::map<std::string, double> &params, const std::set<std::string> &known,
                        const std::string &model_id)
    {
      for (const auto &[key, value] : params)
      {
        (void)value;
        if (!known.count(key))
          throw std::invalid_argument("model '" + model_id + "': unknown parameter '" + key + "'");
      }
    }
  } // namespace

  // ---------------------------------------------------------------- car4

  CarModel::CarModel(const CarParams &params, double dt)
      : DynamicsModel(4, 2, dt), params_(params)
  {
    if (!(params.wheelbase > 0.0))
      throw std::invalid_argument("car4: wheelbase must be positive");
  }

  void CarModel::eval_drift(const Dual2 *, Dual2 *) const
  {
    // All motion is control-driven.
  }

  void CarModel::eval_input(const Dual2 *x, Dual2 *g) const
  {
    const Dual2 &heading = x[2];
    const Dual2 &steer = x[3];
    g[0 * 2 + 0] = cos(heading);
    g[1 * 2 + 0] = sin(heading);
    g[2 * 2 + 0] = tan(steer) * (1.0 / params_.wheelbase);
    g[3 * 2 + 1] = Dual2(1.0);
  }

  // ------------------------------------------------------------ trailer6

  TrailerModel::TrailerModel(const TrailerParams &params, double dt)
      : DynamicsModel(6, 2, dt), params_(params)
  {
    if (!(params.wheelbase > 0.0))
      throw std::invalid_argument("trailer6: wheelbase must be positive");
  }

  void TrailerModel::eval_drift(const Dual2 *, Dual2 *) const {}

  void TrailerModel::eval_input(const Dual2 *x, Dual2 *g) const
  {
    const double inv_len = 1.0 / params_.wheelbase;
    const Dual2 &heading = x[2];
    const Dual2 &steer = x[3];
    const Dual2 &trailer1 = x[4];
    const Dual2 &trailer2 = x[5];
    g[0 * 2 + 0] = cos(heading);
    g[1 * 2 + 0] = sin(heading);
    g[2 * 2 + 0] = tan(steer) * inv_len;
    g[3 * 2 + 1] = Dual2(1.0);
    g[4 * 2 + 0] = sin(heading - trailer1) * inv_len;
    g[5 * 2 + 0] = cos(heading - trailer1) * sin(trailer1 - trailer2) * inv_len;
  }

  // --------------------------------------------------------- quadrotor12

  QuadrotorModel::QuadrotorModel(const QuadrotorParams &params, double dt)
      : DynamicsModel(12, 4, dt), params_(params)
  {
    if (!(params.mass > 0.0))
      throw std::invalid_argument("quadrotor12: mass must be positive");
    if (params.drag < 0.0)
      throw std::invalid_argument("quadrotor12: drag must be nonnegative");
    if (!(params.inertia.array() > 0.0).all())
      throw std::invalid_argument("quadrotor12: inertia entries must be positive");
    if (std::abs(params.mixing.determinant()) < 1e-12)
      throw std::invalid_argument("quadrotor12: mixing matrix must be invertible");
  }

  VectorXd QuadrotorModel::hover_command() const
  {
    Eigen::Vector4d wrench(params_.mass * params_.gravity, 0.0, 0.0, 0.0);
    return params_.mixing.fullPivLu().solve(wrench);
  }

  void QuadrotorModel::eval_drift(const Dual2 *x, Dual2 *f) const
  {
    const Dual2 &roll = x[3];
    const Dual2 &pitch = x[4];
    const Dual2 sr = sin(roll), cr = cos(roll);
    const Dual2 tp = tan(pitch), cp = cos(pitch);

    // Position rates.
    f[0] = x[6];
    f[1] = x[7];
    f[2] = x[8];
    // Euler-angle rates from body rates (ZYX convention).
    f[3] = x[9] + sr * tp * x[10] + cr * tp * x[11];
    f[4] = cr * x[10] - sr * x[11];
    f[5] = (sr * x[10] + cr * x[11]) / cp;
    // Velocity rates: gravity and linear drag (thrust enters via the input matrix).
    const double drag_over_mass = params_.drag / params_.mass;
    f[6] = -drag_over_mass * x[6];
    f[7] = -drag_over_mass * x[7];
    f[8] = Dual2(-params_.gravity) - drag_over_mass * x[8];
    // Body rates change only through torques.
  }

  void QuadrotorModel::eval_input(const Dual2 *x, Dual2 *g) const
  {
    const Dual2 &roll = x[3];
    const Dual2 &pitch = x[4];
    const Dual2 &yaw = x[5];
    const Dual2 sr = sin(roll), cr = cos(roll);
    const Dual2 sp = sin(pitch), cp = cos(pitch);
    const Dual2 sy = sin(yaw), cy = cos(yaw);

    // Third column of the world-from-body rotation: thrust direction.
    const Dual2 ez[3] = {cy * sp * cr + sy * sr,
                         sy * sp * cr - cy * sr,
                         cp * cr};
    const double inv_mass = 1.0 / params_.mass;
    for (int j = 0; j < 4; ++j)
    {
      const double force_gain = params_.mixing(0, j) * inv_mass;
      g[(6 + 0) * 4 + j] = ez[0] * force_gain;
      g[(6 + 1) * 4 + j] = ez[1] * force_gain;
      g[(6 + 2) * 4 + j] = ez[2] * force_gain;
      for (int axis = 0; axis < 3; ++axis)
        g[(9 + axis) * 4 + j] = Dual2(params_.mixing(1 + axis, j) / params_.inertia(axis));
    }
  }

  // -------------------------------------------------------------- linear

  LinearModel::LinearModel(MatrixXd drift_matrix, MatrixXd input_matrix, double dt)
      : DynamicsModel(static_cast<int>(drift_matrix.rows()), static_cast<int>(input_matrix.cols()), dt),
        M_(std::move(drift_matrix)), G_(std::move(input_matrix))
  {
    if (M_.rows() != M_.cols() || G_.rows() != M_.rows())
      throw std::invalid_argument("LinearModel: inconsistent matrix dimensions");
  }

  void LinearModel::eval_drift(const Dual2 *x, Dual2 *f) const
  {
    for (int r = 0; r < M_.rows(); ++r)
      for (int c = 0; c < M_.cols(); ++c)
        f[r] += Dual2(M_(r, c)) * x[c];
  }

  void LinearModel::eval_input(const Dual2 *, Dual2 *g) const
  {
    for (int r = 0; r < G_.rows(); ++r)
      for (int c = 0; c < G_.cols(); ++c)
        g[r * G_.cols() + c] = Dual2(G_(r, c));
  }

  // ------------------------------------------------------------- factory

  std::unique_ptr<DynamicsModel> make_model(const std::string &id,
                                            const std::map<std::string, double> &params,
                                            double dt,
                                            const Eigen::Matrix4d *quad_mixing)
  {
    if (id == "car4")
    {
      reject_unknown(params, {"L"}, id);
      CarParams p;
      p.wheelbase = param_or(params, "L", p.wheelbase);
      return std::make_unique<CarModel>(p, dt);
    }
    if (id == "trailer6")
    {
      reject_unknown(params, {"L"}, id);
      TrailerParams p;
      p.wheelbase = param_or(params, "L", p.wheelbase);
      return std::make_unique<TrailerModel>(p, dt);
    }
    if (id == "quadrotor12")
    {
      reject_unknown(params, {"m", "k_d", "gravity", "Ixx", "Iyy", "Izz"}, id);
      QuadrotorParams p;
      p.mass = param_or(params, "m", p.mass);
      p.drag = param_or(params, "k_d", p.drag);
      p.gravity = param_or(params, "gravity", p.gravity);
      p.inertia(0) = param_or(params, "Ixx", p.inertia(0));
      p.inertia(1) = param_or(params, "Iyy", p.inertia(1));
      p.inertia(2) = param_or(params, "Izz", p.inertia(2));
      if (quad_mixing)
        p.mixing = *quad_mixing;
      return std::make_unique<QuadrotorModel>(p, dt);
    }
    throw std::invalid_argument("make_model: unknown model id '" + id + "'");
  }

} // namespace tpfc
