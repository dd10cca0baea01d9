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

#include <stdexcept>
#include <vector>

#include "tpfc/types.hpp"

namespace tpfc::detail
{

  /// Internal signal: quadratic model not positive definite on the free set;
  /// the solver reacts by raising its regularization.
  struct NotPositiveDefinite : std::runtime_error
  {
    explicit NotPositiveDefinite(const std::string &what) : std::runtime_error(what) {}
  };

  struct BoxQpResult
  {
    VectorXd d;                 // minimizer
    std::vector<bool> free_dim; // true where the box is inactive at the solution
    int free_count = 0;
  };

  /// Minimizes 0.5 d^T H d + g^T d over lo <= d <= hi by projected Newton
  /// with free-set factorization. Bounds may be +-infinity. Throws
  /// NotPositiveDefinite when H restricted to a free set fails Cholesky.
  BoxQpResult box_qp(const MatrixXd &H, const VectorXd &g, const VectorXd &lo, const VectorXd &hi);

  /// Solves H[free,free] X = Rhs[free,cols] and scatters -X into the free
  /// rows of a zero matrix: the feedback-gain rows for clamped controls are
  /// zero.
  MatrixXd free_set_gain(const MatrixXd &H, const MatrixXd &rhs, const std::vector<bool> &free_dim);

} // namespace tpfc::detail
