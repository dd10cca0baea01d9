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

#include <benchmark/benchmark.h>

#include "tpfc/gains.hpp"
#include "tpfc/models.hpp"
#include "tpfc/solver.hpp"

using namespace tpfc;

// Horizon scaling of the perturbation-feedback backward pass (12-state model).
static void BM_BackwardPass(benchmark::State &state)
{
  const int N = static_cast<int>(state.range(0));
  QuadrotorModel model({}, 0.1);
  VectorXd goal = VectorXd::Zero(12);
  goal(2) = 1.0;
  CostModel cost(MatrixXd::Identity(12, 12), MatrixXd::Identity(12, 12), MatrixXd::Identity(4, 4),
                 goal);
  const NominalTrajectory traj =
      make_nominal(model, cost, goal, std::vector<VectorXd>(N, model.hover_command()));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(backward_pass_tpfc(traj, cost));
  }
  state.SetComplexityN(N);
}
BENCHMARK(BM_BackwardPass)->Arg(50)->Arg(100)->Arg(200)->Complexity(benchmark::oN);
