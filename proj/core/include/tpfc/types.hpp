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

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace tpfc
{

  using Eigen::MatrixXd;
  using Eigen::RowVectorXd;
  using Eigen::VectorXd;

  // State and control vectors are plain dense vectors; the owning model fixes
  // the dimensions and every operation validates them on entry.
  using State = Eigen::VectorXd;
  using Control = Eigen::VectorXd;

  /// Third-order tensor T[i](j,k), stored as one matrix slice per leading
  /// (output) index i. Used for the second derivatives of the discrete
  /// dynamics map, which get contracted against a costate row vector.
  class Tensor3
  {
  public:
    Tensor3() = default;
    Tensor3(int n0, int n1, int n2) : n0_(n0), slices_(n0, MatrixXd::Zero(n1, n2)) {}

    static Tensor3 Zero(int n0, int n1, int n2) { return Tensor3(n0, n1, n2); }

    int dim0() const { return n0_; }
    int dim1() const { return n0_ > 0 ? static_cast<int>(slices_[0].rows()) : 0; }
    int dim2() const { return n0_ > 0 ? static_cast<int>(slices_[0].cols()) : 0; }
    bool empty() const { return n0_ == 0; }

    MatrixXd &operator[](int i) { return slices_[i]; }
    const MatrixXd &operator[](int i) const { return slices_[i]; }

    double max_abs() const
    {
      double m = 0.0;
      for (const auto &s : slices_)
        m = std::max(m, s.cwiseAbs().maxCoeff());
      return n0_ > 0 ? m : 0.0;
    }

  private:
    int n0_ = 0;
    std::vector<MatrixXd> slices_;
  };

  /// Contraction over the output index: (g ⊗ T)(j,k) = Σ_i g(i) T[i](j,k).
  inline MatrixXd contract(const RowVectorXd &g, const Tensor3 &T)
  {
    if (g.size() != T.dim0())
      throw std::invalid_argument("contract: vector length does not match tensor leading dimension");
    MatrixXd out = MatrixXd::Zero(T.dim1(), T.dim2());
    for (int i = 0; i < T.dim0(); ++i)
      out.noalias() += g(i) * T[i];
    return out;
  }

  /// First and second derivatives of the discrete dynamics map about a
  /// nominal point. A and B are the Jacobians of the map w.r.t. state and
  /// control; rxx and rxu are the state-state and state-control second
  /// derivative tensors of the same map (identically zero for a map that is
  /// linear in state and control).
  struct Linearization
  {
    MatrixXd A;
    MatrixXd B;
    Tensor3 rxx; // rxx[i](j,k) = d^2 step_i / dx_j dx_k
    Tensor3 rxu; // rxu[i](j,k) = d^2 step_i / dx_j du_k
  };

} // namespace tpfc
