// Copyright 2026 The merge_egt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MERGE_EGT__STYLE_ESTIMATION_HPP_
#define MERGE_EGT__STYLE_ESTIMATION_HPP_

#include <cstdint>
#include <vector>

#include "merge_egt/baselines.hpp"
#include "merge_egt/egt_core.hpp"
#include "merge_egt/payoff_model.hpp"

namespace merge_egt
{

/// Bisection belief over a hidden MV style: omega in [k_l, k_u].
struct StyleBelief
{
  double k_l{0.0};
  double k_u{1.0};
  double omega_hat{0.5};
  // Set when observations contradict each other (bounds crossed).
  bool inconsistent{false};

  double width() const { return k_u - k_l; }
};

struct Reaction
{
  bool accelerated{false};
};

/// Range of MV omega over which the equilibrium keeps its current value.
/// Endpoints lie on the side where the equilibrium still holds.
struct StabilityInterval
{
  double lo{0.0};
  double hi{1.0};
  bool stale{false};
};

/// Which pair of bound assignments to apply on a mispredicted reaction.
enum class BranchReading {
  // Predicted accelerate, saw none: k_u := lo. Predicted yield, saw acceleration: k_l := hi.
  Pseudocode,
  // Swapped assignments, kept only for comparison runs.
  Prose,
};

inline constexpr double kSpeedDeadband = 1e-3;          // m/s
inline constexpr double kDefaultGridStep = 1.0 / 1024;  // omega units
inline constexpr double kBoundaryTolerance = 1e-4;      // omega units

/// Scan omega outward from `ctx.mv_style.omega` and return the maximal
/// contiguous interval on which `policy` still returns `ess`, refining each
/// edge by bisection to kBoundaryTolerance.
StabilityInterval ess_stability_interval(
  const GameContext & ctx, const StrategyState & ess, double grid_step = kDefaultGridStep,
  Policy policy = Policy::Egt);

Reaction observed_reaction(double v_now, double v_prev);

/// Bound update from a precomputed interval. Never widens the belief.
StyleBelief update_belief(
  const StyleBelief & b, const StrategyState & ess, const Reaction & r, const StabilityInterval & interval,
  BranchReading reading = BranchReading::Pseudocode);

/// Bound update that derives the interval from `ctx` (built at b.omega_hat).
StyleBelief update_belief(
  const StyleBelief & b, const StrategyState & ess, const Reaction & r, const GameContext & ctx,
  BranchReading reading = BranchReading::Pseudocode, Policy policy = Policy::Egt);

/// Truthful synthetic MV: plays the MV side of the equilibrium computed with
/// its true omega. Without an equilibrium it best-responds to `av_move`.
Reaction truthful_reaction(const GameContext & ctx, double true_omega, AvMove av_move);

// ---------------------------------------------------------------------------
// Probing test bench

/// State family for active probing: AV and MV speeds fixed, MV distance varied
/// inside [mv_dist_min, mv_dist_max].
struct ProbeSetup
{
  AgentView av{100.0, 10.0};
  double mv_speed{10.0};
  double mv_dist_min{60.0};
  double mv_dist_max{240.0};
  DrivingStyle av_style{0.5, 1.5};
  double headway_T{1.0};
  double probe_offset{0.02};  // omega distance between flip threshold and estimate
  int max_interactions{40};
};

struct ProbeStep
{
  int interaction{0};
  double mv_dist{0.0};
  StrategyState predicted;
  bool predicted_valid{false};
  Reaction reaction;
  bool updated{false};
  StyleBelief belief;
};

struct ProbeResult
{
  std::vector<ProbeStep> steps;
  StyleBelief final_belief;
  int bound_updates{0};
  // Number of bound-updating interactions after which |omega_hat - omega*| <= 0.05
  // held for the rest of the run; -1 if never.
  int updates_to_converge{-1};
  bool containment_held{true};
};

/// Runs the estimator against a truthful MV, choosing each interaction's MV
/// distance so the equilibrium flips just above or just below the current
/// estimate. `seed` jitters the offset.
ProbeResult run_probe_bench(double true_omega, const ProbeSetup & setup, std::uint64_t seed);

}  // namespace merge_egt

#endif  // MERGE_EGT__STYLE_ESTIMATION_HPP_
