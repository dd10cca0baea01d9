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

#include "tpfc/costs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tpfc
{

  namespace
  {
    void require_symmetric(const MatrixXd &m, const std::string &name)
    {
      if (m.rows() != m.cols())
        throw std::invalid_argument(name + " must be square");
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument(name + " must be symmetric");
    }

    void require_psd(const MatrixXd &m, const std::string &name)
    {
      require_symmetric(m, name);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      if (es.eigenvalues().minCoeff() < -1e-10 * scale)
        throw std::invalid_argument(name + " must be positive semidefinite");
    }

    void require_pd(const MatrixXd &m, const std::string &name)
    {
      require_symmetric(m, name);
      Eigen::LLT<MatrixXd> llt(m);
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument(name + " must be positive definite");
    }
  } // namespace

  Ellipsoid::Ellipsoid(VectorXd c, MatrixXd E) : center(std::move(c)), shape(std::move(E))
  {
    if (shape.rows() != shape.cols() || shape.rows() != center.size())
      throw std::invalid_argument("Ellipsoid: inconsistent dimensions");
    require_symmetric(shape, "Ellipsoid shape");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(shape, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("Ellipsoid shape must be positive definite");
  }

  BarrierObstacle::BarrierObstacle(Ellipsoid e, double gamma_, double rho_, std::vector<int> selector)
      : ellipsoid(std::move(e)), gamma(gamma_), rho(rho_), position_selector(std::move(selector))
  {
    if (!(gamma > 0.0))
      throw std::invalid_argument("BarrierObstacle: gamma must be positive");
    if (!(rho > 0.0))
      throw std::invalid_argument("BarrierObstacle: rho must be positive");
    if (static_cast<int>(position_selector.size()) != ellipsoid.center.size())
      throw std::invalid_argument("BarrierObstacle: selector size must match ellipsoid dimension");
  }

  double BarrierObstacle::value(const VectorXd &x) const
  {
    VectorXd p(position_selector.size());
    for (size_t i = 0; i < position_selector.size(); ++i)
      p(static_cast<int>(i)) = x(position_selector[i]);
    return gamma * std::exp(-rho * ellipsoid.level(p));
  }

  void BarrierObstacle::add_derivatives(const VectorXd &x, RowVectorXd &grad, MatrixXd &hess) const
  {
    const int d = static_cast<int>(position_selector.size());
    VectorXd p(d);
    for (int i = 0; i < d; ++i)
      p(i) = x(position_selector[i]);
    const VectorXd v = p - ellipsoid.center;
    const VectorXd ev = ellipsoid.shape * v;
    const double c = gamma * std::exp(-rho * v.dot(ev));
    // dC/dp = -2 rho C (E v);  d2C/dp2 = C (4 rho^2 (Ev)(Ev)^T - 2 rho E)
    const VectorXd g = -2.0 * rho * c * ev;
    const MatrixXd h = c * (4.0 * rho * rho * ev * ev.transpose() - 2.0 * rho * ellipsoid.shape);
    for (int i = 0; i < d; ++i)
    {
      grad(position_selector[i]) += g(i);
      for (int j = 0; j < d; ++j)
        hess(position_selector[i], position_selector[j]) += h(i, j);
    }
  }

  CostModel::CostModel(MatrixXd Q, MatrixXd Qf, MatrixXd R, VectorXd goal,
                       std::vector<BarrierObstacle> obstacles)
      : Q_(std::move(Q)), Qf_(std::move(Qf)), R_(std::move(R)), goal_(std::move(goal)),
        obstacles_(std::move(obstacles))
  {
    require_psd(Q_, "Q");
    require_psd(Qf_, "Qf");
    require_pd(R_, "R");
    if (Q_.rows() != goal_.size() || Qf_.rows() != goal_.size())
      throw std::invalid_argument("CostModel: Q/Qf dimensions must match the goal state");
    const int nx = static_cast<int>(goal_.size());
    for (const auto &obs : obstacles_)
      for (int idx : obs.position_selector)
        if (idx < 0 || idx >= nx)
          throw std::invalid_argument("CostModel: obstacle position selector out of range");
  }

  void CostModel::check_state(const VectorXd &x) const
  {
    if (x.size() != goal_.size())
      throw std::invalid_argument("CostModel: state dimension mismatch");
  }

  double CostModel::state_cost(const VectorXd &x) const
  {
    check_state(x);
    const VectorXd d = x - goal_;
    double c = 0.5 * d.dot(Q_ * d);
    for (const auto &obs : obstacles_)
      c += obs.value(x);
    return c;
  }

  double CostModel::step_cost(const VectorXd &x, const VectorXd &u) const
  {
    if (u.size() != R_.rows())
      throw std::invalid_argument("CostModel: control dimension mismatch");
    return state_cost(x) + 0.5 * u.dot(R_ * u);
  }

  StepCostDerivatives CostModel::step_derivatives(const VectorXd &x, const VectorXd &u) const
  {
    check_state(x);
    if (u.size() != R_.rows())
      throw std::invalid_argument("CostModel: control dimension mismatch");
    StepCostDerivatives d;
    d.state_grad = ((x - goal_).transpose() * Q_).eval();
    d.state_hess = Q_;
    for (size_t i = 0; i < obstacles_.size(); ++i)
    {
      obstacles_[i].add_derivatives(x, d.state_grad, d.state_hess);
      if (!d.state_grad.allFinite() || !d.state_hess.allFinite())
        throw std::runtime_error("CostModel: non-finite barrier derivatives from obstacle " + std::to_string(i));
    }
    d.control_grad = R_ * u;
    d.control_hess = R_;
    return d;
  }

  double CostModel::terminal_cost(const VectorXd &x) const
  {
    check_state(x);
    const VectorXd d = x - goal_;
    return 0.5 * d.dot(Qf_ * d);
  }

  TerminalCostDerivatives CostModel::terminal_derivatives(const VectorXd &x) const
  {
    check_state(x);
    TerminalCostDerivatives out;
    const VectorXd d = x - goal_;
    out.value = 0.5 * d.dot(Qf_ * d);
    out.grad = (d.transpose() * Qf_).eval();
    out.hess = Qf_;
    return out;
  }

} // namespace tpfc
