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

#include "merge_egt/payoff_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace merge_egt
{

namespace
{

void require(bool ok, const char * what)
{
  if (!ok) {
    throw std::invalid_argument(std::string("GameContext: ") + what);
  }
}

PlayerCost player_cost(double omega, const ArrivalTime & arrival, const AgentView & self)
{
  PlayerCost c;
  c.arrival_time = arrival.seconds;
  c.avg_accel = required_avg_accel(self.dist_to_merge, self.speed, arrival.seconds);
  c.efficiency = omega * c.arrival_time;
  c.comfort = (1.0 - omega) * c.avg_accel * c.avg_accel;
  return c;
}

}  // namespace

void GameContext::validate() const
{
  require(std::isfinite(av.dist_to_merge) && std::isfinite(mv.dist_to_merge), "distances must be finite");
  require(av.speed > 0.0 && std::isfinite(av.speed), "AV speed must be > 0");
  require(mv.speed > 0.0 && std::isfinite(mv.speed), "MV speed must be > 0");
  require(av_style.omega > 0.0 && av_style.omega < 1.0, "AV omega must lie in (0,1)");
  require(mv_style.omega > 0.0 && mv_style.omega < 1.0, "MV omega must lie in (0,1)");
  require(headway_T > 0.0 && std::isfinite(headway_T), "headway must be > 0");
}

GameContext GameContext::with_mv_omega(double omega) const
{
  GameContext copy = *this;
  copy.mv_style.omega = omega;
  return copy;
}

ArrivalTime target_arrival_time(const GameContext & ctx, Role role, bool yields)
{
  const AgentView & opponent = role == Role::Av ? ctx.mv : ctx.av;
  if (!(opponent.speed > 0.0)) {
    throw std::invalid_argument("target_arrival_time: opponent speed must be > 0");
  }
  const double projected = opponent.dist_to_merge / opponent.speed;
  if (yields) {
    return {projected + ctx.headway_T, false};
  }
  const double t = projected - ctx.headway_T;
  if (t <= kMinArrivalTime) {
    return {kMinArrivalTime, true};
  }
  return {t, false};
}

double required_avg_accel(double d, double v, double t)
{
  if (!(t > 0.0)) {
    throw std::invalid_argument("required_avg_accel: t must be > 0");
  }
  return 2.0 * (d - v * t) / (t * t);
}

int conflict_weight(const StrategyPair & pair)
{
  const bool both_go = pair.av == AvMove::Merge && pair.mv == MvMove::Accelerate;
  const bool both_yield = pair.av == AvMove::Yield && pair.mv == MvMove::Yield;
  return both_go || both_yield ? 1 : 0;
}

CellCosts cell_costs(const GameContext & ctx, const StrategyPair & pair)
{
  const auto av_time = target_arrival_time(ctx, Role::Av, pair.av == AvMove::Yield);
  const auto mv_time = target_arrival_time(ctx, Role::Mv, pair.mv == MvMove::Yield);

  CellCosts out;
  out.av = player_cost(ctx.av_style.omega, av_time, ctx.av);
  out.mv = player_cost(ctx.mv_style.omega, mv_time, ctx.mv);
  out.conflict = conflict_weight(pair);
  out.infeasible_aggressive = av_time.infeasible_aggressive || mv_time.infeasible_aggressive;

  const double shared = out.conflict * std::abs(out.av.avg_accel + out.mv.avg_accel);
  out.av.safety = shared;
  out.mv.safety = shared;
  out.av.total = out.av.efficiency + out.av.comfort + out.av.safety;
  out.mv.total = out.mv.efficiency + out.mv.comfort + out.mv.safety;
  return out;
}

PayoffMatrix build_matrix(const GameContext & ctx)
{
  ctx.validate();
  const auto yy = cell_costs(ctx, {AvMove::Yield, MvMove::Yield});
  const auto ya = cell_costs(ctx, {AvMove::Yield, MvMove::Accelerate});
  const auto my = cell_costs(ctx, {AvMove::Merge, MvMove::Yield});
  const auto ma = cell_costs(ctx, {AvMove::Merge, MvMove::Accelerate});

  PayoffMatrix m;
  m.u11 = -yy.av.total;
  m.u12 = -ya.av.total;
  m.u21 = -my.av.total;
  m.u22 = -ma.av.total;
  m.v11 = -yy.mv.total;
  m.v12 = -ya.mv.total;
  m.v21 = -my.mv.total;
  m.v22 = -ma.mv.total;
  return m;
}

}  // namespace merge_egt
