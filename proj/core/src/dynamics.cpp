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

#include "tpfc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tpfc
{

  DynamicsModel::DynamicsModel(int state_dim, int control_dim, double dt)
      : nx_(state_dim), nu_(control_dim), dt_(dt)
  {
    if (state_dim <= 0 || control_dim <= 0)
      throw std::invalid_argument("DynamicsModel: dimensions must be positive");
    if (!(dt > 0.0))
      throw std::invalid_argument("DynamicsModel: dt must be positive");
  }

  void DynamicsModel::check_state(const VectorXd &x) const
  {
    if (x.size() != nx_)
      throw std::invalid_argument("DynamicsModel: state dimension mismatch (got " +
                                  std::to_string(x.size()) + ", expected " + std::to_string(nx_) + ")");
  }

  void DynamicsModel::check_control(const VectorXd &u) const
  {
    if (u.size() != nu_)
      throw std::invalid_argument("DynamicsModel: control dimension mismatch (got " +
                                  std::to_string(u.size()) + ", expected " + std::to_string(nu_) + ")");
  }

  void DynamicsModel::eval_at(const std::vector<Dual2> &xd, std::vector<Dual2> &f,
                              std::vector<Dual2> &g) const
  {
    f.assign(nx_, Dual2());
    g.assign(static_cast<size_t>(nx_) * nu_, Dual2());
    eval_drift(xd.data(), f.data());
    eval_input(xd.data(), g.data());
  }

  VectorXd DynamicsModel::drift(const VectorXd &x) const
  {
    check_state(x);
    std::vector<Dual2> xd(nx_), f, g;
    for (int i = 0; i < nx_; ++i)
      xd[i] = Dual2(x(i));
    f.assign(nx_, Dual2());
    eval_drift(xd.data(), f.data());
    VectorXd out(nx_);
    for (int i = 0; i < nx_; ++i)
      out(i) = f[i].v;
    return out;
  }

  MatrixXd DynamicsModel::input_matrix(const VectorXd &x) const
  {
    check_state(x);
    std::vector<Dual2> xd(nx_), g;
    for (int i = 0; i < nx_; ++i)
      xd[i] = Dual2(x(i));
    g.assign(static_cast<size_t>(nx_) * nu_, Dual2());
    eval_input(xd.data(), g.data());
    MatrixXd out(nx_, nu_);
    for (int r = 0; r < nx_; ++r)
      for (int c = 0; c < nu_; ++c)
        out(r, c) = g[static_cast<size_t>(r) * nu_ + c].v;
    return out;
  }

  VectorXd DynamicsModel::step(const VectorXd &x, const VectorXd &u) const
  {
    check_state(x);
    check_control(u);
    std::vector<Dual2> xd(nx_), f, g;
    for (int i = 0; i < nx_; ++i)
      xd[i] = Dual2(x(i));
    eval_at(xd, f, g);
    VectorXd out(nx_);
    for (int r = 0; r < nx_; ++r)
    {
      double rate = f[r].v;
      for (int c = 0; c < nu_; ++c)
        rate += g[static_cast<size_t>(r) * nu_ + c].v * u(c);
      out(r) = x(r) + rate * dt_;
    }
    if (!out.allFinite())
      throw std::runtime_error("DynamicsModel::step: non-finite state (model blow-up) in model '" + id() + "'");
    return out;
  }

  void DynamicsModel::jacobians(const VectorXd &x, const VectorXd &u, MatrixXd &A, MatrixXd &B) const
  {
    check_state(x);
    check_control(u);
    A.setZero(nx_, nx_);
    B.setZero(nx_, nu_);
    std::vector<Dual2> xd(nx_), f, g;
    for (int i = 0; i < nx_; ++i)
      xd[i] = Dual2(x(i));
    for (int j = 0; j < nx_; ++j)
    {
      xd[j].a = 1.0;
      eval_at(xd, f, g);
      xd[j].a = 0.0;
      for (int r = 0; r < nx_; ++r)
      {
        double da = f[r].a;
        for (int c = 0; c < nu_; ++c)
          da += g[static_cast<size_t>(r) * nu_ + c].a * u(c);
        A(r, j) = dt_ * da + (r == j ? 1.0 : 0.0);
      }
      if (j == 0)
      {
        for (int r = 0; r < nx_; ++r)
          for (int c = 0; c < nu_; ++c)
            B(r, c) = dt_ * g[static_cast<size_t>(r) * nu_ + c].v;
      }
    }
    if (!A.allFinite() || !B.allFinite())
      throw std::runtime_error("DynamicsModel::jacobians: non-finite derivative entries in model '" + id() + "'");
  }

  Linearization DynamicsModel::linearize(const VectorXd &x, const VectorXd &u) const
  {
    Linearization lin;
    lin.A.setZero(nx_, nx_);
    lin.B.setZero(nx_, nu_);
    lin.rxx = Tensor3::Zero(nx_, nx_, nx_);
    lin.rxu = Tensor3::Zero(nx_, nx_, nu_);
    check_state(x);
    check_control(u);

    std::vector<Dual2> xd(nx_), f, g;
    for (int i = 0; i < nx_; ++i)
      xd[i] = Dual2(x(i));

    // First-order passes: column j of A, and the x-derivative of g which is
    // both the curvature of the control-affine map in (x, u) and, scaled by
    // dt, the rxu tensor.
    for (int j = 0; j < nx_; ++j)
    {
      xd[j].a = 1.0;
      eval_at(xd, f, g);
      xd[j].a = 0.0;
      for (int r = 0; r < nx_; ++r)
      {
        double da = f[r].a;
        for (int c = 0; c < nu_; ++c)
        {
          const Dual2 &gc = g[static_cast<size_t>(r) * nu_ + c];
          da += gc.a * u(c);
          lin.rxu[r](j, c) = dt_ * gc.a;
        }
        lin.A(r, j) = dt_ * da + (r == j ? 1.0 : 0.0);
      }
      if (j == 0)
      {
        for (int r = 0; r < nx_; ++r)
          for (int c = 0; c < nu_; ++c)
            lin.B(r, c) = dt_ * g[static_cast<size_t>(r) * nu_ + c].v;
      }
    }

    // Mixed second-derivative passes for the state-state tensor.
    for (int j = 0; j < nx_; ++j)
    {
      for (int k = j; k < nx_; ++k)
      {
        xd[j].a = 1.0;
        xd[k].b = 1.0;
        eval_at(xd, f, g);
        xd[j].a = 0.0;
        xd[k].b = 0.0;
        for (int r = 0; r < nx_; ++r)
        {
          double dab = f[r].ab;
          for (int c = 0; c < nu_; ++c)
            dab += g[static_cast<size_t>(r) * nu_ + c].ab * u(c);
          lin.rxx[r](j, k) = dt_ * dab;
          lin.rxx[r](k, j) = dt_ * dab;
        }
      }
    }

    if (!lin.A.allFinite() || !lin.B.allFinite())
      throw std::runtime_error("DynamicsModel::linearize: non-finite derivative entries in model '" + id() + "'");
    return lin;
  }

  namespace
  {

    Linearization fd_pass(const DynamicsModel &model, const VectorXd &x, const VectorXd &u, double h)
    {
      const int nx = model.state_dim();
      const int nu = model.control_dim();
      Linearization lin;
      lin.A.setZero(nx, nx);
      lin.B.setZero(nx, nu);
      lin.rxx = Tensor3::Zero(nx, nx, nx);
      lin.rxu = Tensor3::Zero(nx, nx, nu);

      auto stepped = [&](const VectorXd &xs, const VectorXd &us)
      { return model.step(xs, us); };

      for (int j = 0; j < nx; ++j)
      {
        VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        lin.A.col(j) = (stepped(xp, u) - stepped(xm, u)) / (2.0 * h);
      }
      for (int c = 0; c < nu; ++c)
      {
        VectorXd up = u, um = u;
        up(c) += h;
        um(c) -= h;
        lin.B.col(c) = (stepped(x, up) - stepped(x, um)) / (2.0 * h);
      }
      // Cross second differences; the j == k case reduces to the standard
      // centered second difference with spacing 2h.
      for (int j = 0; j < nx; ++j)
      {
        for (int k = j; k < nx; ++k)
        {
          VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
          xpp(j) += h;
          xpp(k) += h;
          xpm(j) += h;
          xpm(k) -= h;
          xmp(j) -= h;
          xmp(k) += h;
          xmm(j) -= h;
          xmm(k) -= h;
          VectorXd d = (stepped(xpp, u) - stepped(xpm, u) - stepped(xmp, u) + stepped(xmm, u)) / (4.0 * h * h);
          for (int r = 0; r < nx; ++r)
          {
            lin.rxx[r](j, k) = d(r);
            lin.rxx[r](k, j) = d(r);
          }
        }
        for (int c = 0; c < nu; ++c)
        {
          VectorXd xp = x, xm = x;
          xp(j) += h;
          xm(j) -= h;
          VectorXd up = u, um = u;
          up(c) += h;
          um(c) -= h;
          VectorXd d = (stepped(xp, up) - stepped(xp, um) - stepped(xm, up) + stepped(xm, um)) / (4.0 * h * h);
          for (int r = 0; r < nx; ++r)
            lin.rxu[r](j, c) = d(r);
        }
      }
      return lin;
    }

    double max_abs_diff(const Linearization &p, const Linearization &q)
    {
      double m = (p.A - q.A).cwiseAbs().maxCoeff();
      m = std::max(m, (p.B - q.B).cwiseAbs().maxCoeff());
      for (int i = 0; i < p.rxx.dim0(); ++i)
        m = std::max(m, (p.rxx[i] - q.rxx[i]).cwiseAbs().maxCoeff());
      for (int i = 0; i < p.rxu.dim0(); ++i)
        m = std::max(m, (p.rxu[i] - q.rxu[i]).cwiseAbs().maxCoeff());
      return m;
    }

    double max_abs_entries(const Linearization &p)
    {
      double m = p.A.cwiseAbs().maxCoeff();
      m = std::max(m, p.B.cwiseAbs().maxCoeff());
      m = std::max(m, p.rxx.max_abs());
      m = std::max(m, p.rxu.max_abs());
      return m;
    }

  } // namespace

  Linearization fd_derivatives(const DynamicsModel &model, const VectorXd &x,
                               const VectorXd &u, double h)
  {
    if (!(h > 0.0))
      throw std::invalid_argument("fd_derivatives: h must be positive");
    Linearization d1 = fd_pass(model, x, u, h);
    Linearization d2 = fd_pass(model, x, u, 2.0 * h);
    Linearization d4 = fd_pass(model, x, u, 4.0 * h);

    // With central differences the h -> 2h -> 4h estimates must keep
    // converging (truncation error ~ h^2). When the h-step disagreement is
    // both larger than the 2h-step one and a sizeable fraction of the
    // derivative scale, roundoff has taken over.
    const double step1 = max_abs_diff(d1, d2);
    const double step2 = max_abs_diff(d2, d4);
    const double scale = std::max(max_abs_entries(d1), max_abs_entries(d4));
    if (step1 > 3.0 * step2 + 1e-14 && step1 > 0.01 * (1.0 + scale))
      throw std::runtime_error("fd_derivatives: non-monotone convergence, h=" + std::to_string(h) +
                               " is too small (catastrophic cancellation)");
    return d1;
  }

} // namespace tpfc
