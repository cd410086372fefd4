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

#ifndef MERGE_EGT__PAYOFF_MODEL_HPP_
#define MERGE_EGT__PAYOFF_MODEL_HPP_

#include "merge_egt/egt_core.hpp"

namespace merge_egt
{

enum class AvMove { Yield, Merge };
enum class MvMove { Yield, Accelerate };
enum class Role { Av, Mv };

struct StrategyPair
{
  AvMove av{AvMove::Yield};
  MvMove mv{MvMove::Yield};
};

/// omega in (0,1) weights efficiency against comfort; larger is more aggressive.
struct DrivingStyle
{
  double omega{0.5};
  double headway{1.5};  // s
};

struct AgentView
{
  double dist_to_merge{0.0};  // m, distance to the centerline intersection
  double speed{0.0};          // m/s
};

/// Inputs for one 2x2 game between the AV and a single MV.
struct GameContext
{
  AgentView av;
  AgentView mv;
  DrivingStyle av_style;
  DrivingStyle mv_style;
  double headway_T{1.0};  // s, right-of-way margin

  /// Throws std::invalid_argument when a field is out of its domain.
  void validate() const;
  GameContext with_mv_omega(double omega) const;
};

/// Floor on the go-branch arrival time.
inline constexpr double kMinArrivalTime = 0.5;  // s

struct ArrivalTime
{
  double seconds{0.0};
  bool infeasible_aggressive{false};
};

/// Target arrival time at the merge point for `role`: the opponent's
/// projected arrival plus T when yielding, minus T when going.
ArrivalTime target_arrival_time(const GameContext & ctx, Role role, bool yields);

/// Mean acceleration needed to cover `d` in time `t` starting at speed `v`.
double required_avg_accel(double d, double v, double t);

/// 1 for (Merge, Accelerate) and (Yield, Yield), 0 otherwise.
int conflict_weight(const StrategyPair & pair);

struct PlayerCost
{
  double arrival_time{0.0};
  double avg_accel{0.0};
  double efficiency{0.0};  // omega * t
  double comfort{0.0};     // (1 - omega) * a^2
  double safety{0.0};      // omega_s * |a_av + a_mv|
  double total{0.0};
};

struct CellCosts
{
  PlayerCost av;
  PlayerCost mv;
  int conflict{0};
  bool infeasible_aggressive{false};
};

CellCosts cell_costs(const GameContext & ctx, const StrategyPair & pair);

/// Fitness matrix (negated costs) in the fixed Yield/Merge x Yield/Accelerate order.
PayoffMatrix build_matrix(const GameContext & ctx);

}  // namespace merge_egt

#endif  // MERGE_EGT__PAYOFF_MODEL_HPP_
