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

#ifndef MERGE_EGT__DECISION_RUNNER_HPP_
#define MERGE_EGT__DECISION_RUNNER_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "merge_egt/baselines.hpp"
#include "merge_egt/egt_core.hpp"
#include "merge_egt/payoff_model.hpp"
#include "merge_egt/style_estimation.hpp"
#include "merge_egt/traffic.hpp"

namespace merge_egt
{

struct Maneuver
{
  enum class Kind { MergeAhead, YieldAndShift };

  Kind kind{Kind::YieldAndShift};
  // MergeAhead: arrive ahead of target. YieldAndShift: arrive behind it.
  std::string target_id;
  bool committed{false};
};

const char * to_string(Maneuver::Kind kind);

/// Fixed or truncated-normal time headway, sampled once per run.
struct HeadwaySpec
{
  enum class Kind { Fixed, Normal };

  Kind kind{Kind::Fixed};
  double mean{1.5};
  double sigma{0.0};

  static constexpr double kMin = 0.5;
  static constexpr double kMax = 3.5;

  double sample(std::mt19937_64 & rng) const;
};

struct VehicleSpec
{
  std::string id;
  Lane lane{Lane::Main};
  double d{0.0};  // m to merge point
  double v{0.0};
  HeadwaySpec headway;
  double length{5.0};
};

struct AvSpec
{
  std::string id{"AV"};
  Lane lane{Lane::Ramp};
  double d{100.0};
  double v{10.0};
  double omega{0.5};
  double length{5.0};
  double idm_headway{1.5};  // car following after the lane change
};

struct SimConfig
{
  double duration{10.0};
  double dt{0.1};
  double decision_period{1.0};
  int horizon{5};
  std::uint64_t seed{0};
  double game_headway{2.0};      // s, right-of-way margin inside the game
  double mv_response_lag{1.0};   // s, first-order lag on MV acceleration
  IdmParams idm;                 // shared IDM defaults; T is per vehicle
  RoadGeometry road;
  BranchReading branch_reading{BranchReading::Pseudocode};
  std::vector<VehicleSpec> vehicles;
  AvSpec av;

  int steps() const;
  int steps_per_decision() const;
  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

struct StepRecord
{
  double t{0.0};
  std::string id;
  Lane lane{Lane::Main};
  double s{0.0};
  double v{0.0};
  double a{0.0};
};

struct DecisionRecord
{
  int step{0};
  double t{0.0};
  std::string opponent;  // empty when no MV is left to game with
  bool has_profile{false};
  StrategyState profile;
  bool multiple_stable{false};
  Maneuver maneuver;
  StyleBelief belief;
  bool belief_updated{false};
  int av_priority{0};  // 1-based position in the merging list
  int conceded{0};     // MVs the AV has yielded to so far
  double planned_s_end{0.0};
};

struct CollisionEvent
{
  double t{0.0};
  std::string first;
  std::string second;
};

struct SimTrace
{
  double dt{0.1};
  int n_steps{0};
  std::string av_id;
  std::vector<std::string> ids;                 // config order, AV last
  std::vector<double> lengths;                  // parallel to ids
  std::map<std::string, double> headways;       // sampled per MV
  std::map<std::string, double> true_omega;     // style implied by each headway
  std::vector<StepRecord> steps;                // n_steps * ids.size(), step-major
  std::vector<DecisionRecord> decisions;
  std::vector<CollisionEvent> collisions;
  std::vector<std::string> final_order;         // by arc length, downstream first
  int av_final_index{0};
  bool av_merged{false};
  double merge_time{-1.0};
  int requeues{0};

  std::span<const StepRecord> step(int k) const;
  /// Vehicle id directly behind / ahead of the AV in `final_order`, "" if none.
  std::string av_follower() const;
  std::string av_leader() const;
};

/// Ground-truth style for an MV with IDM headway T (aggressive = short T).
double style_from_headway(double headway);

/// ESS (0,1) merges ahead of the opponent; everything else yields.
Maneuver decide(const std::optional<StrategyState> & profile, const std::string & opponent);
Maneuver decide(const EquilibriumReport & report, const std::string & opponent);

inline constexpr double kMaxControlAccel = 3.0;   // m/s^2
inline constexpr double kMaxControlDecel = -8.0;  // m/s^2

/// Longitudinal AV command from the target-arrival law, clamped to
/// [kMaxControlDecel, kMaxControlAccel].
double merge_control(const GameContext & ctx, const Maneuver & m);

struct LaneChangeResult
{
  VehicleState av;
  bool requeue{false};
};

/// Instantaneous lane reassignment after a bumper-gap check against both
/// neighbours of the target gap. `front`/`rear` may be null.
LaneChangeResult execute_lane_change(
  const VehicleState & av, const VehicleState * front, const VehicleState * rear, double min_gap);

SimTrace run_scenario(const SimConfig & cfg, Policy policy = Policy::Egt);

}  // namespace merge_egt

#endif  // MERGE_EGT__DECISION_RUNNER_HPP_
