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

#include "boxqp.hpp"

#include <cmath>

namespace tpfc::detail
{

  namespace
  {
    MatrixXd gather(const MatrixXd &m, const std::vector<int> &rows, const std::vector<int> &cols)
    {
      MatrixXd out(rows.size(), cols.size());
      for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
          out(static_cast<int>(i), static_cast<int>(j)) = m(rows[i], cols[j]);
      return out;
    }

    Eigen::LLT<MatrixXd> factor_free(const MatrixXd &H, const std::vector<int> &free_idx)
    {
      Eigen::LLT<MatrixXd> llt(gather(H, free_idx, free_idx));
      if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("box_qp: Hessian not positive definite on the free set");
      return llt;
    }
  } // namespace

  BoxQpResult box_qp(const MatrixXd &H, const VectorXd &g, const VectorXd &lo, const VectorXd &hi)
  {
    const int n = static_cast<int>(g.size());
    constexpr int kMaxIter = 100;
    constexpr double kGradTol = 1e-10;

    VectorXd d = VectorXd::Zero(n).cwiseMax(lo).cwiseMin(hi);
    double value = 0.5 * d.dot(H * d) + g.dot(d);

    BoxQpResult result;
    result.free_dim.assign(n, true);

    for (int iter = 0; iter < kMaxIter; ++iter)
    {
      const VectorXd grad = g + H * d;
      std::vector<int> free_idx;
      for (int j = 0; j < n; ++j)
      {
        const bool at_lo = d(j) <= lo(j) && grad(j) > 0.0;
        const bool at_hi = d(j) >= hi(j) && grad(j) < 0.0;
        result.free_dim[j] = !(at_lo || at_hi);
        if (result.free_dim[j])
          free_idx.push_back(j);
      }
      result.free_count = static_cast<int>(free_idx.size());
      if (free_idx.empty())
        break;

      double gnorm = 0.0;
      for (int j : free_idx)
        gnorm = std::max(gnorm, std::abs(grad(j)));
      if (gnorm < kGradTol)
        break;

      auto llt = factor_free(H, free_idx);
      // Newton target for the free block with clamped coordinates held fixed.
      VectorXd rhs(free_idx.size());
      for (size_t i = 0; i < free_idx.size(); ++i)
        rhs(static_cast<int>(i)) = grad(free_idx[i]);
      const VectorXd delta = -llt.solve(rhs);

      double directional = 0.0;
      for (size_t i = 0; i < free_idx.size(); ++i)
        directional += grad(free_idx[i]) * delta(static_cast<int>(i));
      if (directional > -1e-15)
        break;

      bool accepted = false;
      for (double alpha = 1.0; alpha > 1e-10; alpha *= 0.5)
      {
        VectorXd cand = d;
        for (size_t i = 0; i < free_idx.size(); ++i)
          cand(free_idx[i]) += alpha * delta(static_cast<int>(i));
        cand = cand.cwiseMax(lo).cwiseMin(hi);
        const double cand_value = 0.5 * cand.dot(H * cand) + g.dot(cand);
        if (cand_value <= value + 1e-4 * alpha * directional)
        {
          d = cand;
          value = cand_value;
          accepted = true;
          break;
        }
      }
      if (!accepted)
        break;
    }

    result.d = d;
    return result;
  }

  MatrixXd free_set_gain(const MatrixXd &H, const MatrixXd &rhs, const std::vector<bool> &free_dim)
  {
    std::vector<int> free_idx;
    for (size_t j = 0; j < free_dim.size(); ++j)
      if (free_dim[j])
        free_idx.push_back(static_cast<int>(j));
    MatrixXd K = MatrixXd::Zero(rhs.rows(), rhs.cols());
    if (free_idx.empty())
      return K;
    auto llt = factor_free(H, free_idx);
    MatrixXd rhs_free(free_idx.size(), rhs.cols());
    for (size_t i = 0; i < free_idx.size(); ++i)
      rhs_free.row(static_cast<int>(i)) = rhs.row(free_idx[i]);
    const MatrixXd sol = -llt.solve(rhs_free);
    for (size_t i = 0; i < free_idx.size(); ++i)
      K.row(free_idx[i]) = sol.row(static_cast<int>(i));
    return K;
  }

} // namespace tpfc::detail
