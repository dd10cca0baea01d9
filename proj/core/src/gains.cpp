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

#include "tpfc/gains.hpp"

#include <cassert>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "value_expansion.hpp"

namespace tpfc
{

  namespace
  {
    void require_cache(const NominalTrajectory &traj, const char *who)
    {
      if (static_cast<int>(traj.lin.size()) != traj.horizon() || traj.horizon() < 1)
        throw std::invalid_argument(std::string(who) + ": trajectory lacks linearization cache");
    }

    Eigen::LLT<MatrixXd> require_pd(const MatrixXd &S, int t, const char *who)
    {
      Eigen::LLT<MatrixXd> llt(S);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error(std::string(who) + ": S_t not positive definite at t=" + std::to_string(t));
      return llt;
    }
  } // namespace

  GainSchedule backward_pass_tpfc(const NominalTrajectory &traj, const CostModel &cost,
                                  double stationarity_warn_tol)
  {
    require_cache(traj, "backward_pass_tpfc");
    const int N = traj.horizon();

    detail::ProblemExpansion exp =
        detail::expand_problem(traj.lin, cost, traj.states, traj.controls);

    GainSchedule gs;
    gs.G.resize(N + 1);
    gs.P.resize(N + 1);
    gs.K.resize(N);
    gs.S.resize(N);
    gs.nominal_residual =
        detail::projected_residual(exp, traj.controls, traj.u_lower, traj.u_upper);
    gs.nominal_stationary = gs.nominal_residual <= stationarity_warn_tol;

    gs.G[N] = exp.terminal.grad;
    gs.P[N] = exp.terminal.hess;

    for (int t = N - 1; t >= 0; --t)
    {
      const MatrixXd &A = exp.A[t];
      const MatrixXd &B = exp.B[t];
      const MatrixXd &P_next = gs.P[t + 1];
      const RowVectorXd &G_next = gs.G[t + 1];

      const MatrixXd S = exp.step[t].control_hess + B.transpose() * P_next * B;
      auto llt = require_pd(S, t, "backward_pass_tpfc");

      const MatrixXd coupling = B.transpose() * P_next * A + contract(G_next, traj.lin[t].rxu).transpose();
      const MatrixXd K = -llt.solve(coupling);

      MatrixXd P = exp.step[t].state_hess + A.transpose() * P_next * A -
                   K.transpose() * S * K + contract(G_next, traj.lin[t].rxx);
      // The recursion preserves symmetry analytically; floating point does not.
      assert(((P - P.transpose()).cwiseAbs().maxCoeff()) < 1e-8 * std::max(1.0, P.cwiseAbs().maxCoeff()));
      P = 0.5 * (P + P.transpose()).eval();

      gs.S[t] = S;
      gs.K[t] = K;
      gs.P[t] = std::move(P);
      gs.G[t] = exp.step[t].state_grad + G_next * A;
    }
    return gs;
  }

  GainSchedule backward_pass_tlqr(const NominalTrajectory &traj, const MatrixXd &Q,
                                  const MatrixXd &R, const MatrixXd &Qf)
  {
    require_cache(traj, "backward_pass_tlqr");
    const int N = traj.horizon();
    const int nx = static_cast<int>(traj.states[0].size());

    GainSchedule gs;
    gs.G.assign(N + 1, RowVectorXd::Zero(nx));
    gs.P.resize(N + 1);
    gs.K.resize(N);
    gs.S.resize(N);
    gs.P[N] = Qf;

    for (int t = N - 1; t >= 0; --t)
    {
      const MatrixXd &A = traj.lin[t].A;
      const MatrixXd &B = traj.lin[t].B;
      const MatrixXd &P_next = gs.P[t + 1];
      const MatrixXd S = R + B.transpose() * P_next * B;
      auto llt = require_pd(S, t, "backward_pass_tlqr");
      const MatrixXd K = -llt.solve(B.transpose() * P_next * A);
      MatrixXd P = Q + A.transpose() * P_next * A - K.transpose() * S * K;
      P = 0.5 * (P + P.transpose()).eval();
      gs.S[t] = S;
      gs.K[t] = K;
      gs.P[t] = std::move(P);
    }
    return gs;
  }

  GainSchedule ilqg_gains(const NominalTrajectory &traj)
  {
    if (!traj.has_solver_gains)
      throw std::runtime_error("ilqg_gains: trajectory carries no solver gain cache (not produced by solve_ocp)");
    return traj.solver_gains;
  }

  double costate_gradient_check(const NominalTrajectory &traj, const DynamicsModel &model,
                                const CostModel &cost, double h, int directions, unsigned seed)
  {
    require_cache(traj, "costate_gradient_check");
    const int N = traj.horizon();
    const int nx = model.state_dim();

    // Costate rows by the first-order recursion alone.
    std::vector<RowVectorXd> G(N + 1);
    G[N] = cost.terminal_derivatives(traj.states[N]).grad;
    for (int t = N - 1; t >= 0; --t)
      G[t] = cost.step_derivatives(traj.states[t], traj.controls[t]).state_grad + G[t + 1] * traj.lin[t].A;

    auto suffix_cost = [&](VectorXd x, int t)
    {
      double total = 0.0;
      for (int s = t; s < N; ++s)
      {
        total += cost.step_cost(x, traj.controls[s]);
        x = model.step(x, traj.controls[s]);
      }
      return total + cost.terminal_cost(x);
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t <= N; ++t)
    {
      for (int d = 0; d < directions; ++d)
      {
        VectorXd dir(nx);
        for (int i = 0; i < nx; ++i)
          dir(i) = gauss(rng);
        dir.normalize();
        const double fd =
            (suffix_cost(traj.states[t] + h * dir, t) - suffix_cost(traj.states[t] - h * dir, t)) / (2.0 * h);
        const double analytic = G[t].dot(dir);
        const double scale = std::abs(fd) + 1e-9 * (1.0 + std::abs(traj.cost_to_go[t]));
        worst = std::max(worst, std::abs(analytic - fd) / scale);
      }
    }
    return worst;
  }

  void write_gain_bundle(const GainSchedule &gains, const std::string &directory)
  {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    auto write_rows = [&](const std::string &name, auto getter, size_t count)
    {
      std::ofstream out(fs::path(directory) / name);
      if (!out)
        throw std::runtime_error("write_gain_bundle: cannot open " + name);
      out.precision(17);
      for (size_t t = 0; t < count; ++t)
      {
        const MatrixXd m = getter(t);
        out << t;
        for (int r = 0; r < m.rows(); ++r)
          for (int c = 0; c < m.cols(); ++c)
            out << ',' << m(r, c);
        out << '\n';
      }
    };
    write_rows("G.csv", [&](size_t t) -> MatrixXd { return gains.G[t]; }, gains.G.size());
    write_rows("P.csv", [&](size_t t) -> MatrixXd { return gains.P[t]; }, gains.P.size());
    write_rows("K.csv", [&](size_t t) -> MatrixXd { return gains.K[t]; }, gains.K.size());
    write_rows("S.csv", [&](size_t t) -> MatrixXd { return gains.S[t]; }, gains.S.size());
  }

} // namespace tpfc
