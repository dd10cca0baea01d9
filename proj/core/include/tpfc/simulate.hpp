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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tpfc/gains.hpp"
#include "tpfc/solver.hpp"

namespace tpfc
{

  enum class NoiseMode
  {
    Process, // additive state noise eps*sqrt(dt)*w, w ~ N(0, I_nx)
    Actuator // additive control noise eps*||u_s||_inf*v, v ~ N(0, I_nu)
  };

  struct NoiseConfig
  {
    double epsilon = 0.0;
    double dt = 0.1;
    std::uint64_t seed = 0;
    NoiseMode mode = NoiseMode::Process;
    double actuator_scale = 0.0; // ||u_s||_inf; derived from bounds when 0
  };

  /// Adds the per-step process disturbance eps*sqrt(dt)*w to a deterministic
  /// successor state, drawing w from the rollout's dedicated stream.
  VectorXd disturb(const NoiseConfig &noise, std::mt19937_64 &rng, const VectorXd &x_next);

  struct ReplanPolicy
  {
    double c_th = 0.05;
    bool enabled = true;
  };

  struct RolloutResult
  {
    std::string controller;
    std::uint64_t seed = 0;
    int horizon = 0;
    std::vector<VectorXd> states;      // N+1 realized states
    std::vector<VectorXd> controls;    // N commanded (clamped) controls
    double cost = 0.0;                 // incurred step costs + terminal cost
    std::vector<int> replan_times;     // cost-triggered replans (and every step for NMPC)
    std::vector<double> policy_eval_s; // per-step time to produce the control
    double plan_s = 0.0;               // initial plan + replans (all solves for NMPC)
    double exec_s = 0.0;               // remaining loop time
  };

  /// Mid-run failure (replan or NMPC solve); carries whatever was executed
  /// before the failing step.
  class RolloutError : public std::runtime_error
  {
  public:
    RolloutError(const std::string &what, RolloutResult partial, int step)
        : std::runtime_error(what), partial_(std::move(partial)), step_(step) {}
    const RolloutResult &partial() const { return partial_; }
    int step() const { return step_; }

  private:
    RolloutResult partial_;
    int step_;
  };

  enum class ControllerId
  {
    Tpfc,
    Nmpc,
    Tlqr,
    Ilqg
  };

  std::string to_string(ControllerId id);
  ControllerId controller_from_string(const std::string &name);

  /// Everything a controller needs to plan and execute one scenario.
  struct SimProblem
  {
    const DynamicsModel *model = nullptr;
    const CostModel *cost = nullptr;
    VectorXd x0;
    int horizon = 0;
    SolverConfig solver;
    // Tracking weights for the T-LQR baseline (tuned separately from the
    // nominal cost).
    MatrixXd tlqr_Q, tlqr_R, tlqr_Qf;
    // Optional seed for the initial plan.
    std::vector<VectorXd> seed_controls;
  };

  /// u = nominal control + K * (x - nominal state), clamped to the bounds.
  Control apply_policy(const NominalTrajectory &traj, const GainSchedule &gains,
                       const VectorXd &x, int t);

  /// Fraction of the active plan's total cost by which the incurred cost has
  /// overrun the nominal so far: (incurred - nominal_so_far) / nominal_total.
  /// Returns 0 for the degenerate zero-cost nominal.
  double cost_fraction(const NominalTrajectory &traj, double incurred_cost_so_far, int t);

  RolloutResult run_tpfc(const SimProblem &problem, const NoiseConfig &noise,
                         const ReplanPolicy &replan);
  RolloutResult run_nmpc(const SimProblem &problem, const NoiseConfig &noise);
  RolloutResult run_tlqr(const SimProblem &problem, const NoiseConfig &noise,
                         const ReplanPolicy &replan);
  RolloutResult run_ilqg_feedback(const SimProblem &problem, const NoiseConfig &noise,
                                  const ReplanPolicy &replan);
  RolloutResult run_controller(ControllerId id, const SimProblem &problem,
                               const NoiseConfig &noise, const ReplanPolicy &replan);

  struct MonteCarloSummary
  {
    std::string controller;
    std::uint64_t base_seed = 0;
    int runs = 0;

    struct RunRecord
    {
      std::uint64_t seed = 0;
      double cost = 0.0;
      int replans = 0;
      double plan_s = 0.0;
      double exec_s = 0.0;
    };

    struct EpsRow
    {
      double epsilon = 0.0;
      double mean_cost = 0.0;
      double std_cost = 0.0;
      double mean_replans = 0.0;
      double plan_s = 0.0;  // summed over runs
      double exec_s = 0.0;  // summed over runs
      double total_s = 0.0; // plan_s + exec_s
      std::vector<RunRecord> per_run;
      std::vector<VectorXd> mean_controls; // seed-averaged commanded controls
    };

    std::vector<EpsRow> rows;
  };

  /// Runs `runs` rollouts per epsilon with seeds base_seed .. base_seed+runs-1
  /// (the same seed set for every controller: common random numbers), fanned
  /// out over worker threads (TPFC_THREADS overrides the count) and merged
  /// deterministically in seed order. Rollout errors propagate with the
  /// offending seed attached.
  MonteCarloSummary monte_carlo(ControllerId id, const SimProblem &problem,
                                const std::vector<double> &eps_grid, int runs,
                                std::uint64_t base_seed, const ReplanPolicy &replan,
                                NoiseMode mode = NoiseMode::Process, int threads = 0);

} // namespace tpfc
