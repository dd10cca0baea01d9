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

#include "tpfc/diagnostics.hpp"

#include <cmath>
#include <random>

namespace tpfc
{

  namespace
  {
    double block_rel_err(const MatrixXd &got, const MatrixXd &want)
    {
      return (got - want).cwiseAbs().maxCoeff() / (1.0 + want.cwiseAbs().maxCoeff());
    }
  } // namespace

  double dynamics_derivative_check(const DynamicsModel &model, int samples, unsigned seed, double h)
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s)
    {
      VectorXd x(model.state_dim()), u(model.control_dim());
      for (int i = 0; i < x.size(); ++i)
        x(i) = uni(rng);
      for (int i = 0; i < u.size(); ++i)
        u(i) = uni(rng);

      const Linearization exact = model.linearize(x, u);
      const Linearization fd = fd_derivatives(model, x, u, h);
      worst = std::max(worst, block_rel_err(exact.A, fd.A));
      worst = std::max(worst, block_rel_err(exact.B, fd.B));
      for (int i = 0; i < exact.rxx.dim0(); ++i)
        worst = std::max(worst, block_rel_err(exact.rxx[i], fd.rxx[i]));
      for (int i = 0; i < exact.rxu.dim0(); ++i)
        worst = std::max(worst, block_rel_err(exact.rxu[i], fd.rxu[i]));
    }
    return worst;
  }

  double cost_derivative_check(const CostModel &cost, int samples, unsigned seed, double h)
  {
    const int nx = cost.state_dim();
    const int nu = cost.control_dim();

    // Sample from a box spanning the goal and the obstacle centers so the
    // barrier terms actually contribute.
    VectorXd lo = cost.goal(), hi = cost.goal();
    for (const auto &obs : cost.obstacles())
      for (size_t i = 0; i < obs.position_selector.size(); ++i)
      {
        const int idx = obs.position_selector[i];
        lo(idx) = std::min(lo(idx), obs.ellipsoid.center(static_cast<int>(i)));
        hi(idx) = std::max(hi(idx), obs.ellipsoid.center(static_cast<int>(i)));
      }
    lo.array() -= 2.0;
    hi.array() += 2.0;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const VectorXd u0 = VectorXd::Zero(nu);

    double worst = 0.0;
    for (int s = 0; s < samples; ++s)
    {
      VectorXd x(nx);
      for (int i = 0; i < nx; ++i)
        x(i) = lo(i) + (hi(i) - lo(i)) * uni(rng);

      const StepCostDerivatives d = cost.step_derivatives(x, u0);
      const TerminalCostDerivatives td = cost.terminal_derivatives(x);

      RowVectorXd fd_grad(nx), fd_tgrad(nx);
      MatrixXd fd_hess(nx, nx), fd_thess(nx, nx);
      for (int i = 0; i < nx; ++i)
      {
        VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        fd_grad(i) = (cost.state_cost(xp) - cost.state_cost(xm)) / (2.0 * h);
        fd_tgrad(i) = (cost.terminal_cost(xp) - cost.terminal_cost(xm)) / (2.0 * h);
        for (int j = i; j < nx; ++j)
        {
          VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
          xpp(i) += h;
          xpp(j) += h;
          xpm(i) += h;
          xpm(j) -= h;
          xmp(i) -= h;
          xmp(j) += h;
          xmm(i) -= h;
          xmm(j) -= h;
          const double v = (cost.state_cost(xpp) - cost.state_cost(xpm) - cost.state_cost(xmp) +
                            cost.state_cost(xmm)) /
                           (4.0 * h * h);
          fd_hess(i, j) = v;
          fd_hess(j, i) = v;
          const double tv = (cost.terminal_cost(xpp) - cost.terminal_cost(xpm) -
                             cost.terminal_cost(xmp) + cost.terminal_cost(xmm)) /
                            (4.0 * h * h);
          fd_thess(i, j) = tv;
          fd_thess(j, i) = tv;
        }
      }
      worst = std::max(worst, block_rel_err(d.state_grad, fd_grad));
      worst = std::max(worst, block_rel_err(d.state_hess, fd_hess));
      worst = std::max(worst, block_rel_err(td.grad, fd_tgrad));
      worst = std::max(worst, block_rel_err(td.hess, fd_thess));
    }
    return worst;
  }

} // namespace tpfc
