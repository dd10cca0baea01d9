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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tpfc/gains.hpp"
#include "tpfc/solver.hpp"

using namespace tpfc;

namespace
{
  struct SolvedCar
  {
    CarModel model{CarParams{0.5}, 0.1};
    CostModel cost;
    NominalTrajectory traj;

    explicit SolvedCar(int N = 40) : cost(make_cost())
    {
      SolverConfig cfg;
      cfg.stationarity_tol = 1e-9;
      auto [t, report] = solve_ocp(model, cost, VectorXd::Zero(4), N, cfg);
      REQUIRE(report.converged);
      traj = std::move(t);
    }

    static CostModel make_cost()
    {
      VectorXd goal(4);
      goal << 2.0, 1.5, 0.0, 0.0;
      VectorXd qd(4), qfd(4);
      qd << 0.5, 0.5, 0.1, 0.1;
      qfd << 30, 30, 10, 5;
      return CostModel(qd.asDiagonal(), qfd.asDiagonal(), MatrixXd::Identity(2, 2) * 0.5, goal);
    }
  };

  double max_gain_diff(const GainSchedule &a, const GainSchedule &b)
  {
    double m = 0.0;
    for (size_t t = 0; t < a.K.size(); ++t)
      m = std::max(m, (a.K[t] - b.K[t]).cwiseAbs().maxCoeff());
    return m;
  }
} // namespace

TEST_CASE("contract: zero tensor, selector rows, random triple-loop oracle")
{
  Tensor3 T(3, 3, 2);
  SUBCASE("zero tensor gives the zero matrix")
  {
    const MatrixXd out = contract(RowVectorXd::Ones(3), T);
    CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 2; ++k)
        T[i](j, k) = uni(rng);
  SUBCASE("unit-vector contraction selects a slice")
  {
    RowVectorXd e1 = RowVectorXd::Zero(3);
    e1(1) = 1.0;
    CHECK((contract(e1, T) - T[1]).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("random contraction matches explicit summation")
  {
    RowVectorXd g(3);
    g << 0.3, -1.2, 0.7;
    MatrixXd expected = MatrixXd::Zero(3, 2);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 3; ++i)
          expected(j, k) += g(i) * T[i](j, k);
    CHECK((contract(g, T) - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("dimension mismatch is rejected")
  {
    CHECK_THROWS_AS(contract(RowVectorXd::Ones(4), T), std::invalid_argument);
  }
}

TEST_CASE("LQ problem: perturbation-feedback gains equal the Riccati oracle, and all three schedules coincide")
{
  auto prob = oracles::random_lq(4, 2, 40, 2024);
  const auto oracle = oracles::solve_lq(prob.Ad, prob.Bd, prob.cost->Q(), prob.cost->R(),
                                        prob.cost->Qf(), prob.cost->goal(), prob.x0, prob.horizon);
  SolverConfig cfg;
  cfg.stationarity_tol = 1e-11;
  auto [traj, report] = solve_ocp(*prob.model, *prob.cost, prob.x0, prob.horizon, cfg);
  REQUIRE(report.converged);

  const GainSchedule tpfc = backward_pass_tpfc(traj, *prob.cost);
  const GainSchedule tlqr = backward_pass_tlqr(traj, prob.cost->Q(), prob.cost->R(), prob.cost->Qf());
  const GainSchedule ilqg = ilqg_gains(traj);

  for (int t = 0; t < prob.horizon; ++t)
  {
    CHECK((tpfc.K[t] - oracle.K[t]).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((tlqr.K[t] - oracle.K[t]).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((ilqg.K[t] - oracle.K[t]).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK(max_gain_diff(tpfc, tlqr) < 1e-9);
  CHECK(max_gain_diff(tpfc, ilqg) < 1e-9);
  CHECK(tpfc.nominal_stationary);

  SUBCASE("linear dynamics produce exactly zero curvature tensors along the nominal")
  {
    for (const auto &lin : traj.lin)
    {
      CHECK(lin.rxx.max_abs() == 0.0);
      CHECK(lin.rxu.max_abs() == 0.0);
    }
  }
}

TEST_CASE("one-step scalar recursion, worked by hand")
{
  // Discrete A = 1, B = 1 (dt = 1), R = 1, Q = 0, Qf = 1, goal 0.
  LinearModel model(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1), 1.0);
  CostModel cost(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
                 VectorXd::Zero(1));
  // Stationary nominal from x0 = 1: u = -x1 with x1 = x0 + u -> u = -1/2.
  const NominalTrajectory traj =
      make_nominal(model, cost, VectorXd::Ones(1), {VectorXd::Constant(1, -0.5)});
  const GainSchedule gs = backward_pass_tpfc(traj, cost);
  CHECK(gs.S[0](0, 0) == 2.0);
  CHECK(gs.K[0](0, 0) == -0.5);
  CHECK(gs.P[0](0, 0) == 0.5);
  CHECK(gs.G[1](0) == 0.5);
  CHECK(gs.G[0](0) == gs.G[1](0)); // G0 = L0 + G1 * A = G1 here
}

TEST_CASE("terminal consistency: G_N and P_N are the terminal derivatives")
{
  SolvedCar sc;
  const GainSchedule gs = backward_pass_tpfc(sc.traj, sc.cost);
  const auto term = sc.cost.terminal_derivatives(sc.traj.states.back());
  CHECK((gs.G.back() - term.grad).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gs.P.back() - term.hess).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("costate chain identity holds exactly as computed")
{
  SolvedCar sc;
  const GainSchedule gs = backward_pass_tpfc(sc.traj, sc.cost);
  for (int t = sc.traj.horizon() - 1; t >= 0; --t)
  {
    const RowVectorXd lhs = gs.G[t];
    const RowVectorXd rhs = sc.cost.step_derivatives(sc.traj.states[t], sc.traj.controls[t]).state_grad +
                            gs.G[t + 1] * sc.traj.lin[t].A;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("P stays symmetric")
{
  SolvedCar sc;
  const GainSchedule gs = backward_pass_tpfc(sc.traj, sc.cost);
  for (const auto &P : gs.P)
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("nonlinear nominal: the three gain families genuinely differ")
{
  SolvedCar sc;
  const GainSchedule tpfc = backward_pass_tpfc(sc.traj, sc.cost);
  const GainSchedule tlqr = backward_pass_tlqr(sc.traj, sc.cost.Q(), sc.cost.R(), sc.cost.Qf());
  const GainSchedule ilqg = ilqg_gains(sc.traj);
  CHECK(max_gain_diff(tpfc, tlqr) > 1e-6);
  CHECK(max_gain_diff(tpfc, ilqg) > 1e-9);
}

TEST_CASE("T-LQR with zero weights returns zero gains")
{
  SolvedCar sc;
  const GainSchedule gs = backward_pass_tlqr(sc.traj, MatrixXd::Zero(4, 4),
                                             MatrixXd::Identity(2, 2), MatrixXd::Zero(4, 4));
  for (const auto &K : gs.K)
    CHECK(K.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ilqg gains: cache required, path independent")
{
  SolvedCar sc;
  SUBCASE("a hand-built nominal has no cache")
  {
    const NominalTrajectory plain =
        make_nominal(sc.model, sc.cost, VectorXd::Zero(4), sc.traj.controls);
    CHECK_THROWS_AS(ilqg_gains(plain), std::runtime_error);
  }
  SUBCASE("gains do not depend on the regularization path")
  {
    SolverConfig a, b;
    a.stationarity_tol = b.stationarity_tol = 1e-9;
    a.reg_init = 1e-6;
    b.reg_init = 1e-2;
    b.reg_decrease = 0.25;
    auto [ta, ra] = solve_ocp(sc.model, sc.cost, VectorXd::Zero(4), 40, a);
    auto [tb, rb] = solve_ocp(sc.model, sc.cost, VectorXd::Zero(4), 40, b);
    REQUIRE(ra.converged);
    REQUIRE(rb.converged);
    CHECK(max_gain_diff(ilqg_gains(ta), ilqg_gains(tb)) < 1e-6);
  }
}

TEST_CASE("costate gradient check against frozen-control finite differences")
{
  SUBCASE("LQ problem")
  {
    auto prob = oracles::random_lq(3, 2, 25, 77);
    SolverConfig cfg;
    cfg.stationarity_tol = 1e-11;
    auto [traj, report] = solve_ocp(*prob.model, *prob.cost, prob.x0, prob.horizon, cfg);
    REQUIRE(report.converged);
    CHECK(costate_gradient_check(traj, *prob.model, *prob.cost, 1e-5) < 1e-6);
  }
  SUBCASE("car problem")
  {
    SolvedCar sc;
    CHECK(costate_gradient_check(sc.traj, sc.model, sc.cost, 1e-5) < 1e-3);
  }
}

namespace
{
  // Scalar model with strongly curved input matrix; used to drive the
  // control-space Hessian indefinite.
  class SineInputModel : public DynamicsModel
  {
  public:
    SineInputModel() : DynamicsModel(1, 1, 0.1) {}
    std::string id() const override { return "sine-input"; }

  protected:
    void eval_drift(const Dual2 *, Dual2 *) const override {}
    void eval_input(const Dual2 *x, Dual2 *g) const override { g[0] = sin(x[0]); }
  };
} // namespace

TEST_CASE("S_t losing positive definiteness is reported with the offending step")
{
  SineInputModel model;
  // Tiny terminal curvature but a huge costate: the curvature-costate term
  // drives P negative, and S = R + B^T P B follows.
  CostModel cost(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1) * 1e-3,
                 MatrixXd::Identity(1, 1), VectorXd::Constant(1, -1e7));
  const double half_pi = 1.5707963267948966;
  const NominalTrajectory traj = make_nominal(model, cost, VectorXd::Constant(1, half_pi),
                                              std::vector<VectorXd>(2, VectorXd::Ones(1)));
  try
  {
    backward_pass_tpfc(traj, cost);
    FAIL("expected S_t positive-definiteness failure");
  }
  catch (const std::runtime_error &e)
  {
    CHECK(std::string(e.what()).find("t=") != std::string::npos);
  }
}

TEST_CASE("backward pass wall time grows linearly with the horizon")
{
  QuadrotorModel model({}, 0.1);
  VectorXd goal = VectorXd::Zero(12);
  goal(2) = 1.0;
  CostModel cost(MatrixXd::Identity(12, 12), MatrixXd::Identity(12, 12),
                 MatrixXd::Identity(4, 4), goal);
  const VectorXd hover = model.hover_command();

  auto time_backward = [&](int N)
  {
    const NominalTrajectory traj =
        make_nominal(model, cost, goal, std::vector<VectorXd>(N, hover));
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 7; ++rep)
    {
      const auto t0 = std::chrono::steady_clock::now();
      const GainSchedule gs = backward_pass_tpfc(traj, cost);
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      (void)gs;
      best = std::min(best, dt);
    }
    return best;
  };

  const double t50 = time_backward(50);
  const double t100 = time_backward(100);
  const double t200 = time_backward(200);
  // Least-squares slope of log(time) against log(N).
  const double lx[3] = {std::log(50.0), std::log(100.0), std::log(200.0)};
  const double ly[3] = {std::log(t50), std::log(t100), std::log(t200)};
  const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i)
  {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = num / den;
  CHECK(slope > 0.8);
  CHECK(slope < 1.2);
}

TEST_CASE("gain bundle serialization writes one file per sequence")
{
  SolvedCar sc;
  const GainSchedule gs = backward_pass_tpfc(sc.traj, sc.cost);
  const std::string dir = "gain_bundle_test_out";
  write_gain_bundle(gs, dir);
  for (const char *name : {"G.csv", "P.csv", "K.csv", "S.csv"})
  {
    std::ifstream in(std::string(dir) + "/" + name);
    CHECK(in.good());
    std::string first_line;
    std::getline(in, first_line);
    CHECK(!first_line.empty());
  }
}
