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

#include "tpfc/models.hpp"
#include "tpfc/solver.hpp"

using namespace tpfc;

// Open-loop solve of a mid-size car problem from a cold start.
static void BM_SolveCar(benchmark::State &state)
{
  CarModel model({0.5}, 0.1);
  VectorXd goal(4);
  goal << 2.0, 1.5, 0.0, 0.0;
  VectorXd qd(4), qfd(4);
  qd << 0.5, 0.5, 0.1, 0.1;
  qfd << 30, 30, 10, 5;
  CostModel cost(MatrixXd(qd.asDiagonal()), MatrixXd(qfd.asDiagonal()),
                 MatrixXd::Identity(2, 2) * 0.5, goal);
  SolverConfig cfg;
  cfg.stationarity_tol = 1e-8;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(solve_ocp(model, cost, VectorXd::Zero(4), 60, cfg));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SolveCar)->Unit(benchmark::kMillisecond);
