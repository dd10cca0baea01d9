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
#include "tpfc/scenario.hpp"
#include "tpfc/simulate.hpp"

using namespace tpfc;

// Online cost of the executed policy: one gain multiply plus clamping.
static void BM_PolicyEvalQuadrotor(benchmark::State &state)
{
  ScenarioRuntime runtime(load_scenario("quadrotor12_table2"));
  const SimProblem p = runtime.problem();
  auto [traj, report] = solve_ocp(runtime.model(), runtime.cost(), p.x0, p.horizon, p.solver,
                                  p.seed_controls);
  const GainSchedule gains = backward_pass_tpfc(traj, runtime.cost());
  VectorXd x = traj.states[10];
  x.array() += 0.01;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(apply_policy(traj, gains, x, 10));
  }
}
BENCHMARK(BM_PolicyEvalQuadrotor);
