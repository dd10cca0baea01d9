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

#include <random>

#include "oracles.hpp"
#include "tpfc/diagnostics.hpp"
#include "tpfc/models.hpp"

using namespace tpfc;

namespace
{
  VectorXd vec(std::initializer_list<double> vals)
  {
    VectorXd v(static_cast<int>(vals.size()));
    int i = 0;
    for (double x : vals)
      v(i++) = x;
    return v;
  }

  double lin_diff(const Linearization &a, const Linearization &b)
  {
    double m = (a.A - b.A).cwiseAbs().maxCoeff();
    m = std::max(m, (a.B - b.B).cwiseAbs().maxCoeff());
    for (int i = 0; i < a.rxx.dim0(); ++i)
      m = std::max(m, (a.rxx[i] - b.rxx[i]).cwiseAbs().maxCoeff());
    for (int i = 0; i < a.rxu.dim0(); ++i)
      m = std::max(m, (a.rxu[i] - b.rxu[i]).cwiseAbs().maxCoeff());
    return m;
  }
} // namespace

TEST_CASE("car step: straight drive along +x")
{
  CarModel car({0.5}, 0.1);
  const VectorXd next = car.step(vec({0, 0, 0, 0}), vec({1, 0}));
  CHECK(next(0) == 0.1);
  CHECK(next(1) == 0.0);
  CHECK(next(2) == 0.0);
  CHECK(next(3) == 0.0);
}

TEST_CASE("car step: heading pi/2 advances +y")
{
  CarModel car({0.5}, 0.1);
  const double half_pi = 1.5707963267948966;
  const VectorXd next = car.step(vec({0, 0, half_pi, 0}), vec({1, 0}));
  CHECK(next(0) == doctest::Approx(0.0).epsilon(0).scale(1).margin(1e-12));
  CHECK(next(1) == doctest::Approx(0.1).margin(1e-12));
  CHECK(next(2) == half_pi);
  CHECK(next(3) == 0.0);
}

TEST_CASE("linear model: equilibrium stays put")
{
  MatrixXd M(2, 2);
  M << 0.3, -0.1, 0.2, 0.1;
  LinearModel model(M, MatrixXd::Identity(2, 1), 0.1);
  const VectorXd next = model.step(VectorXd::Zero(2), VectorXd::Zero(1));
  CHECK(next.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step rejects dimension mismatch and non-finite blow-up signals")
{
  CarModel car({0.5}, 0.1);
  CHECK_THROWS_AS(car.step(VectorXd::Zero(3), VectorXd::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(car.step(VectorXd::Zero(4), VectorXd::Zero(3)), std::invalid_argument);
  VectorXd bad = vec({std::numeric_limits<double>::infinity(), 0, 0, 0});
  CHECK_THROWS_AS(car.step(bad, VectorXd::Zero(2)), std::runtime_error);
}

TEST_CASE("linearize: linear model is exact with vanishing tensors")
{
  MatrixXd M(3, 3), G(3, 2);
  M << 0.1, 0.4, -0.2, 0.0, -0.3, 0.5, 0.2, 0.2, 0.1;
  G << 1, 0, 0, 1, 0.5, -0.5;
  const double dt = 0.1;
  LinearModel model(M, G, dt);
  const Linearization lin = model.linearize(vec({0.3, -0.4, 1.0}), vec({0.2, -0.7}));
  CHECK((lin.A - (MatrixXd::Identity(3, 3) + M * dt)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((lin.B - G * dt).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lin.rxx.max_abs() == 0.0);
  CHECK(lin.rxu.max_abs() == 0.0);
}

TEST_CASE("linearize: car at zero heading has no x-heading coupling")
{
  CarModel car({0.5}, 0.1);
  const Linearization lin = car.linearize(vec({0, 0, 0, 0}), vec({1, 0}));
  CHECK(lin.A(0, 2) == 0.0); // d(xdot)/d(heading) = -u sin(0)
}

TEST_CASE("linearize matches finite differences on random points")
{
  CarModel car({0.5}, 0.1);
  QuadrotorModel quad({}, 0.1);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial)
  {
    VectorXd x(4), u(2);
    for (int i = 0; i < 4; ++i)
      x(i) = uni(rng);
    for (int i = 0; i < 2; ++i)
      u(i) = uni(rng);
    CHECK(lin_diff(car.linearize(x, u), fd_derivatives(car, x, u, 1e-5)) < 1e-5);

    VectorXd xq(12), uq(4);
    for (int i = 0; i < 12; ++i)
      xq(i) = uni(rng);
    for (int i = 0; i < 4; ++i)
      uq(i) = uni(rng);
    CHECK(lin_diff(quad.linearize(xq, uq), fd_derivatives(quad, xq, uq, 1e-4)) < 1e-4);
  }
}

TEST_CASE("fd_derivatives: exact on linear models for any h")
{
  MatrixXd M(2, 2), G(2, 1);
  M << 0.2, -0.5, 0.1, 0.3;
  G << 1, 0.4;
  LinearModel model(M, G, 0.1);
  for (double h : {1e-3, 1e-5})
  {
    const Linearization fd = fd_derivatives(model, vec({0.4, -0.2}), vec({0.3}), h);
    CHECK((fd.A - (MatrixXd::Identity(2, 2) + M * 0.1)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((fd.B - G * 0.1).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(fd.rxx.max_abs() < 1e-9);
    CHECK(fd.rxu.max_abs() < 1e-9);
  }
}

TEST_CASE("fd_derivatives: step-size consistency on the car")
{
  CarModel car({0.5}, 0.1);
  const VectorXd x = vec({0.3, -0.1, 0.6, 0.4});
  const VectorXd u = vec({0.5, -0.2});
  const Linearization a = fd_derivatives(car, x, u, 1e-5);
  const Linearization b = fd_derivatives(car, x, u, 1e-4);
  CHECK(lin_diff(a, b) < 1e-4);
}

TEST_CASE("fd_derivatives: quadrotor hover state matches exact derivatives")
{
  QuadrotorModel quad({}, 0.1);
  VectorXd x = VectorXd::Zero(12);
  x(2) = 1.0;
  const VectorXd u = quad.hover_command();
  CHECK(lin_diff(quad.linearize(x, u), fd_derivatives(quad, x, u, 1e-4)) < 1e-4);
}

TEST_CASE("fd_derivatives: rejects a step size drowned in roundoff")
{
  CarModel car({0.5}, 0.1);
  const VectorXd x = vec({0.3, -0.1, 0.6, 0.4});
  const VectorXd u = vec({0.5, -0.2});
  CHECK_THROWS_AS(fd_derivatives(car, x, u, 1e-11), std::runtime_error);
  CHECK_THROWS_AS(fd_derivatives(car, x, u, -1.0), std::invalid_argument);
}

TEST_CASE("trailer: aligned headings give zero trailer rates")
{
  TrailerModel trailer({0.5}, 0.1);
  const MatrixXd g = trailer.input_matrix(vec({1.0, 2.0, 0, 0.2, 0, 0}));
  CHECK(g(4, 0) == 0.0);
  CHECK(g(5, 0) == 0.0);
}

TEST_CASE("quadrotor: zero control and zero velocity is free fall")
{
  QuadrotorModel quad({}, 0.1);
  const VectorXd rate = quad.drift(VectorXd::Zero(12));
  CHECK(rate(8) == doctest::Approx(-9.81));
  CHECK(rate.head(8).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rate.tail(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadrotor: hover command balances gravity through the mixing matrix")
{
  QuadrotorParams params;
  const double arm = 0.17, yaw_coeff = 0.016;
  params.mixing << 1, 1, 1, 1,
      0, arm, 0, -arm,
      -arm, 0, arm, 0,
      yaw_coeff, -yaw_coeff, yaw_coeff, -yaw_coeff;
  QuadrotorModel quad(params, 0.1);
  const VectorXd u = quad.hover_command();
  CHECK(u.size() == 4);
  // Per-rotor split of the weight.
  CHECK(u(0) == doctest::Approx(0.5 * 9.81 / 4.0));
  VectorXd x = VectorXd::Zero(12);
  const VectorXd rate = quad.drift(x) + quad.input_matrix(x) * u;
  CHECK(rate.segment(6, 3).cwiseAbs().maxCoeff() == doctest::Approx(0.0).margin(1e-12));
  CHECK(rate.tail(3).cwiseAbs().maxCoeff() == doctest::Approx(0.0).margin(1e-12));
}

TEST_CASE("model construction rejects non-positive physical parameters")
{
  CHECK_THROWS_AS(CarModel({-0.5}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(CarModel({0.5}, 0.0), std::invalid_argument);
  QuadrotorParams bad;
  bad.mass = 0.0;
  CHECK_THROWS_AS(QuadrotorModel(bad, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_model("car4", {{"L", -1.0}}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_model("car4", {{"unknown", 1.0}}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_model("nosuch", {}, 0.1), std::invalid_argument);
}

TEST_CASE("control affinity holds to machine precision")
{
  CarModel car({0.5}, 0.1);
  TrailerModel trailer({0.5}, 0.1);
  QuadrotorModel quad({}, 0.1);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto check_affine = [&](const DynamicsModel &m)
  {
    VectorXd x(m.state_dim()), u1(m.control_dim()), u2(m.control_dim());
    for (int i = 0; i < x.size(); ++i)
      x(i) = uni(rng);
    for (int i = 0; i < u1.size(); ++i)
    {
      u1(i) = uni(rng);
      u2(i) = uni(rng);
    }
    const VectorXd mix = m.step(x, u1 + u2) - m.step(x, u2) - m.step(x, u1) + m.step(x, VectorXd::Zero(m.control_dim()));
    CHECK(mix.cwiseAbs().maxCoeff() < 1e-13);
  };
  for (int i = 0; i < 20; ++i)
  {
    check_affine(car);
    check_affine(trailer);
    check_affine(quad);
  }
}

TEST_CASE("step is deterministic")
{
  QuadrotorModel quad({}, 0.1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  VectorXd x(12), u(4);
  for (int i = 0; i < 12; ++i)
    x(i) = uni(rng);
  for (int i = 0; i < 4; ++i)
    u(i) = uni(rng);
  const VectorXd a = quad.step(x, u);
  const VectorXd b = quad.step(x, u);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("derivative sweep: all models match finite differences at random samples")
{
  CarModel car({0.5}, 0.1);
  TrailerModel trailer({0.5}, 0.1);
  QuadrotorModel quad({}, 0.1);
  CHECK(dynamics_derivative_check(car, 25, 101) < 1e-4);
  CHECK(dynamics_derivative_check(trailer, 25, 102) < 1e-4);
  CHECK(dynamics_derivative_check(quad, 25, 103) < 1e-4);
}
