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

#include "tpfc/costs.hpp"

namespace tpfc
{

  /// Minimum-volume enclosing ellipsoid of a point set (Khachiyan's
  /// barycentric coordinate-descent). `points` holds one point per column.
  /// Every input point satisfies (p - c)^T E (p - c) <= 1 + tol on return.
  ///
  /// Throws std::invalid_argument when the points are affinely degenerate
  /// (e.g. collinear in 2-D, where no finite-volume ellipsoid exists) and
  /// std::runtime_error when the iteration fails to reach `tol` within
  /// `max_iterations`.
  Ellipsoid mvee(const MatrixXd &points, double tol = 1e-7, int max_iterations = 1000);

} // namespace tpfc
