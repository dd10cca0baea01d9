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

#include <optional>

#include "tpfc/scenario.hpp"

namespace tpfc
{

  /// A Monte Carlo study: which scenario, which controllers, which noise
  /// levels, how many common-random-number runs per level.
  struct ExperimentPlan
  {
    std::string scenario; // preset name or scenario file path
    std::vector<ControllerId> controllers{ControllerId::Tpfc, ControllerId::Nmpc};
    std::vector<double> eps_grid{0.05, 0.1, 0.15, 0.2, 0.25};
    int runs = 100;
    std::uint64_t base_seed = 1;
    std::string out_dir = "out";
    std::optional<NoiseMode> noise_mode; // overrides the scenario's mode
    int threads = 0;

    void validate() const;
  };

  ExperimentPlan plan_from_json_text(const std::string &text);
  ExperimentPlan load_plan(const std::string &path);
  std::string plan_to_json_text(const ExperimentPlan &plan, int indent = 2);

  struct ExperimentResult
  {
    struct Failure
    {
      std::string controller;
      std::string message;
    };
    std::vector<std::string> artifacts; // paths written, relative to out_dir
    std::vector<Failure> failures;
    std::vector<MonteCarloSummary> summaries; // one per completed controller
    double nominal_cost = 0.0;
  };

  /// Runs the plan and writes runs.csv (one row per rollout: controller,
  /// eps, seed, cost, replans, plan_ms, exec_ms), summary.json, the figures
  /// (cost vs epsilon, replan counts, nominal vs seed-averaged control
  /// traces) and a manifest.json listing artifacts and failures. Partial
  /// artifacts survive controller failures.
  ExperimentResult run_experiment(const ExperimentPlan &plan);

} // namespace tpfc
