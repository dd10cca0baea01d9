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

#include "tpfc/mvee.hpp"

#include <stdexcept>

namespace tpfc
{

  Ellipsoid mvee(const MatrixXd &points, double tol, int max_iterations)
  {
    const int d = static_cast<int>(points.rows());
    const int m = static_cast<int>(points.cols());
    if (!(tol > 0.0))
      throw std::invalid_argument("mvee: tol must be positive");
    if (m < d + 1)
      throw std::invalid_argument("mvee: need at least d+1 points");

    // Affine-degeneracy pre-check: centered points must span R^d.
    {
      const VectorXd centroid = points.rowwise().mean();
      MatrixXd centered = points.colwise() - centroid;
      Eigen::FullPivLU<MatrixXd> lu(centered);
      lu.setThreshold(1e-10);
      if (lu.rank() < d)
        throw std::invalid_argument("mvee: points are affinely degenerate (no finite-volume ellipsoid)");
    }

    // Khachiyan iteration on lifted points q_i = (p_i; 1).
    MatrixXd q(d + 1, m);
    q.topRows(d) = points;
    q.bottomRows(1).setOnes();

    VectorXd weights = VectorXd::Constant(m, 1.0 / m);
    for (int iter = 0; iter < max_iterations; ++iter)
    {
      MatrixXd X = q * weights.asDiagonal() * q.transpose();
      Eigen::FullPivLU<MatrixXd> lu(X);
      if (!lu.isInvertible())
        throw std::invalid_argument("mvee: degenerate weight configuration");
      // M_i = q_i^T X^-1 q_i for all points at once.
      VectorXd scores = ((q.transpose() * lu.inverse()).cwiseProduct(q.transpose())).rowwise().sum();
      int worst = 0;
      const double kappa = scores.maxCoeff(&worst);
      if (kappa <= (1.0 + tol) * (d + 1))
      {
        const VectorXd center = points * weights;
        MatrixXd second = points * weights.asDiagonal() * points.transpose() - center * center.transpose();
        Eigen::FullPivLU<MatrixXd> slu(second);
        if (!slu.isInvertible())
          throw std::invalid_argument("mvee: degenerate second-moment matrix");
        MatrixXd shape = slu.inverse() / d;
        shape = 0.5 * (shape + shape.transpose());
        return Ellipsoid(center, shape);
      }
      const double step = (kappa - d - 1.0) / ((d + 1.0) * (kappa - 1.0));
      weights *= (1.0 - step);
      weights(worst) += step;
    }
    throw std::runtime_error("mvee: no convergence within max_iterations (tol=" + std::to_string(tol) + ")");
  }

} // namespace tpfc
