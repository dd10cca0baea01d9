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

#include "value_expansion.hpp"

#include <cmath>

#include "boxqp.hpp"

namespace tpfc::detail
{

  ProblemExpansion expand_problem(const DynamicsModel &model, const CostModel &cost,
                                  const std::vector<VectorXd> &states,
                                  const std::vector<VectorXd> &controls)
  {
    const int N = static_cast<int>(controls.size());
    ProblemExpansion exp;
    exp.A.resize(N);
    exp.B.resize(N);
    exp.step.resize(N);
    for (int t = 0; t < N; ++t)
    {
      model.jacobians(states[t], controls[t], exp.A[t], exp.B[t]);
      exp.step[t] = cost.step_derivatives(states[t], controls[t]);
    }
    exp.terminal = cost.terminal_derivatives(states[N]);
    return exp;
  }

  ProblemExpansion expand_problem(const std::vector<Linearization> &lin, const CostModel &cost,
                                  const std::vector<VectorXd> &states,
                                  const std::vector<VectorXd> &controls)
  {
    const int N = static_cast<int>(controls.size());
    ProblemExpansion exp;
    exp.A.resize(N);
    exp.B.resize(N);
    exp.step.resize(N);
    for (int t = 0; t < N; ++t)
    {
      exp.A[t] = lin[t].A;
      exp.B[t] = lin[t].B;
      exp.step[t] = cost.step_derivatives(states[t], controls[t]);
    }
    exp.terminal = cost.terminal_derivatives(states[N]);
    return exp;
  }

  ValueExpansionPass value_backward_pass(const ProblemExpansion &exp,
                                         const std::vector<VectorXd> &controls,
                                         double mu, const VectorXd &lo, const VectorXd &hi)
  {
    const int N = exp.horizon();
    const int nx = static_cast<int>(exp.terminal.hess.rows());
    const bool bounded = lo.size() > 0;

    ValueExpansionPass out;
    out.k.resize(N);
    out.gains.G.resize(N + 1);
    out.gains.P.resize(N + 1);
    out.gains.K.resize(N);
    out.gains.S.resize(N);

    VectorXd vx = exp.terminal.grad.transpose();
    MatrixXd vxx = exp.terminal.hess;
    out.gains.G[N] = exp.terminal.grad;
    out.gains.P[N] = vxx;

    const MatrixXd reg = mu * MatrixXd::Identity(nx, nx);
    for (int t = N - 1; t >= 0; --t)
    {
      const MatrixXd &A = exp.A[t];
      const MatrixXd &B = exp.B[t];
      const auto &cd = exp.step[t];

      const VectorXd qx = cd.state_grad.transpose() + A.transpose() * vx;
      const VectorXd qu = cd.control_grad + B.transpose() * vx;
      const MatrixXd qxx = cd.state_hess + A.transpose() * vxx * A;
      const MatrixXd quu = cd.control_hess + B.transpose() * vxx * B;

      const MatrixXd vxx_reg = vxx + reg;
      const MatrixXd quu_reg = cd.control_hess + B.transpose() * vxx_reg * B;
      const MatrixXd qux_reg = B.transpose() * vxx_reg * A;

      VectorXd k;
      MatrixXd K;
      if (bounded)
      {
        const VectorXd dlo = lo - controls[t];
        const VectorXd dhi = hi - controls[t];
        BoxQpResult qp = box_qp(quu_reg, qu, dlo, dhi);
        k = qp.d;
        K = free_set_gain(quu_reg, qux_reg, qp.free_dim);
      }
      else
      {
        Eigen::LLT<MatrixXd> llt(quu_reg);
        if (llt.info() != Eigen::Success)
          throw NotPositiveDefinite("value_backward_pass: control Hessian not positive definite at t=" +
                                    std::to_string(t));
        k = -llt.solve(qu);
        K = -llt.solve(qux_reg);
      }

      out.dv1 += k.dot(qu);
      out.dv2 += 0.5 * k.dot(quu_reg * k);

      vx = qx + K.transpose() * (quu_reg * k + qu) + qux_reg.transpose() * k;
      vxx = qxx + K.transpose() * quu_reg * K + K.transpose() * qux_reg + qux_reg.transpose() * K;
      vxx = 0.5 * (vxx + vxx.transpose()).eval();

      out.k[t] = std::move(k);
      out.gains.K[t] = std::move(K);
      out.gains.S[t] = quu;
      out.gains.G[t] = vx.transpose();
      out.gains.P[t] = vxx;
    }
    return out;
  }

  double projected_residual(const ProblemExpansion &exp, const std::vector<VectorXd> &controls,
                            const VectorXd &lo, const VectorXd &hi)
  {
    const int N = exp.horizon();
    const bool bounded = lo.size() > 0;
    RowVectorXd costate = exp.terminal.grad;
    double residual = 0.0;
    for (int t = N - 1; t >= 0; --t)
    {
      const VectorXd grad_u = exp.step[t].control_grad + exp.B[t].transpose() * costate.transpose();
      for (int j = 0; j < grad_u.size(); ++j)
      {
        double violation = std::abs(grad_u(j));
        if (bounded)
        {
          if (controls[t](j) <= lo(j))
            violation = std::max(0.0, -grad_u(j)); // at the lower bound only an inward push counts
          else if (controls[t](j) >= hi(j))
            violation = std::max(0.0, grad_u(j));
        }
        residual = std::max(residual, violation);
      }
      costate = exp.step[t].state_grad + costate * exp.A[t];
    }
    return residual;
  }

} // namespace tpfc::detail
