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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpfc/models.hpp"
#include "tpfc/simulate.hpp"

namespace tpfc
{

  /// Obstacle as specified in a scenario file: either a planar polygon whose
  /// minimum-volume enclosing ellipsoid is computed at load time, or a
  /// directly given (center, shape) pair.
  struct ObstacleSpec
  {
    std::vector<Eigen::Vector2d> polygon; // empty when given directly
    VectorXd center;                      // used when polygon is empty
    MatrixXd shape;
    double gamma = 1e3;
    double rho = 1.0;
    std::vector<int> position_selector{0, 1};

    // Resolved at load (MVEE of the polygon, or validated direct input).
    Ellipsoid resolved;
  };

  /// A fully described experiment scenario. Loaded from JSON (or one of the
  /// embedded presets), validated against the selected model's dimensions.
  struct Scenario
  {
    std::string name;
    std::string model_id = "car4";
    std::map<std::string, double> model_params;
    std::optional<Eigen::Matrix4d> quad_mixing; // quadrotor only

    double dt = 0.1;
    int horizon = 1;
    VectorXd x0, xf;
    VectorXd u_lower, u_upper;

    MatrixXd Q, Qf, R;
    std::vector<ObstacleSpec> obstacles;

    SolverConfig solver; // bounds filled from u_lower/u_upper at load
    ReplanPolicy replan;
    NoiseMode noise_mode = NoiseMode::Process;

    MatrixXd tlqr_Q, tlqr_R, tlqr_Qf;

    std::optional<VectorXd> seed_constant;      // constant control repeated over the horizon
    std::optional<std::string> seed_file;       // CSV, N rows x n_u columns
    std::vector<VectorXd> seed_controls() const;
  };

  /// Owns the instantiated model/cost pair for a scenario.
  class ScenarioRuntime
  {
  public:
    explicit ScenarioRuntime(const Scenario &scenario);

    const DynamicsModel &model() const { return *model_; }
    const CostModel &cost() const { return *cost_; }
    const Scenario &scenario() const { return scenario_; }

    /// Assembles the simulation problem (pointers remain owned by this
    /// runtime, which must outlive the returned value).
    SimProblem problem() const;

  private:
    Scenario scenario_;
    std::unique_ptr<DynamicsModel> model_;
    std::unique_ptr<CostModel> cost_;
  };

  Scenario scenario_from_json_text(const std::string &text);
  std::string scenario_to_json_text(const Scenario &scenario, int indent = 2);

  /// Loads a scenario from a file path, or by preset name when `source`
  /// matches one of the embedded presets.
  Scenario load_scenario(const std::string &source);

  std::vector<std::string> scenario_preset_names();
  bool is_scenario_preset(const std::string &name);

  /// Deep structural equality (used by round-trip checks).
  bool scenario_equal(const Scenario &a, const Scenario &b);

  /// Loads a CSV control sequence (N rows, n_u comma-separated columns).
  std::vector<VectorXd> load_control_csv(const std::string &path, int control_dim);

} // namespace tpfc
