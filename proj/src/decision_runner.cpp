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

#include "merge_egt/decision_runner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace merge_egt
{

namespace
{

// Speeds entering the game are floored so d/v stays finite.
constexpr double kMinGameSpeed = 0.1;  // m/s

bool divides(double whole, double part)
{
  const double n = whole / part;
  return std::abs(n - std::round(n)) < 1e-9 && std::round(n) >= 1.0;
}

std::size_t index_of(const std::vector<VehicleState> & veh, const std::string & id)
{
  for (std::size_t i = 0; i < veh.size(); ++i) {
    if (veh[i].id == id) {
      return i;
    }
  }
  return veh.size();
}

GameContext make_context(
  const SimConfig & cfg, const VehicleState & av, const VehicleState & mv, double mv_omega)
{
  GameContext ctx;
  ctx.av = {cfg.road.dist_to_merge(av.s), std::max(av.v, kMinGameSpeed)};
  ctx.mv = {cfg.road.dist_to_merge(mv.s), std::max(mv.v, kMinGameSpeed)};
  ctx.av_style = {cfg.av.omega, cfg.game_headway};
  ctx.mv_style = {mv_omega, cfg.game_headway};
  ctx.headway_T = cfg.game_headway;
  return ctx;
}

double follow_accel(const IdmParams & p, const VehicleState & self, const VehicleState * leader)
{
  if (leader == nullptr) {
    return idm_accel(p, self.v, kFreeRoadGap, 0.0);
  }
  const double gap = bumper_gap(*leader, self);
  if (gap <= 0.0) {
    return -kIdmEmergencyDecel;
  }
  return idm_accel(p, self.v, gap, self.v - leader->v);
}

// Open-loop rollout of the arrival law with the opponent at constant speed.
double planned_end(const SimConfig & cfg, VehicleState av, VehicleState opponent, const Maneuver & m)
{
  const int n = static_cast<int>(std::lround(cfg.horizon * cfg.decision_period / cfg.dt));
  for (int i = 0; i < n; ++i) {
    const auto ctx = make_context(cfg, av, opponent, 0.5);
    av = step_kinematics(av, merge_control(ctx, m), cfg.dt);
    opponent = step_kinematics(opponent, 0.0, cfg.dt);
  }
  return av.s;
}

}  // namespace

const char * to_string(Maneuver::Kind kind)
{
  return kind == Maneuver::Kind::MergeAhead ? "merge_ahead" : "yield_and_shift";
}

double HeadwaySpec::sample(std::mt19937_64 & rng) const
{
  if (kind == Kind::Fixed) {
    return mean;
  }
  std::normal_distribution<double> dist(mean, sigma);
  for (;;) {
    const double x = dist(rng);
    if (x >= kMin && x <= kMax) {
      return x;
    }
  }
}

int SimConfig::steps() const { return static_cast<int>(std::lround(duration / dt)); }

int SimConfig::steps_per_decision() const { return static_cast<int>(std::lround(decision_period / dt)); }

void SimConfig::validate() const
{
  auto fail = [](const std::string & what) { throw std::invalid_argument("SimConfig: " + what); };
  if (!(dt > 0.0) || !(duration > 0.0) || !(decision_period > 0.0)) {
    fail("duration, dt and decision_period must be > 0");
  }
  if (!divides(decision_period, dt)) {
    fail("dt must divide decision_period");
  }
  if (!divides(duration, dt)) {
    fail("dt must divide duration");
  }
  if (horizon < 1 || decision_period * horizon > duration + 1e-9) {
    fail("decision_period * horizon must not exceed duration");
  }
  if (!(game_headway > 0.0)) {
    fail("game_headway must be > 0");
  }
  if (mv_response_lag < 0.0) {
    fail("mv_response_lag must be >= 0");
  }
  if (!idm.is_valid()) {
    fail("IDM parameters must be positive with delta >= 1");
  }
  if (!(av.omega > 0.0 && av.omega < 1.0)) {
    fail("AV omega must lie in (0,1)");
  }
  if (!(av.v >= 0.0) || !(av.length > 0.0) || !(av.idm_headway > 0.0)) {
    fail("AV speed must be >= 0, length and idm_headway > 0");
  }
  if (vehicles.empty()) {
    fail("at least one main-road vehicle is required");
  }
  std::set<std::string> ids{av.id};
  for (const auto & v : vehicles) {
    if (v.id.empty() || !ids.insert(v.id).second) {
      fail("vehicle ids must be unique and non-empty ('" + v.id + "')");
    }
    if (!(v.v >= 0.0) || !(v.length > 0.0)) {
      fail("vehicle '" + v.id + "' needs v >= 0 and length > 0");
    }
    if (v.headway.kind == HeadwaySpec::Kind::Fixed && !(v.headway.mean > 0.0)) {
      fail("vehicle '" + v.id + "' fixed headway must be > 0");
    }
    if (v.headway.kind == HeadwaySpec::Kind::Normal &&
        (!(v.headway.sigma >= 0.0) || v.headway.mean < HeadwaySpec::kMin - 3.0 * v.headway.sigma ||
         v.headway.mean > HeadwaySpec::kMax + 3.0 * v.headway.sigma)) {
      fail("vehicle '" + v.id + "' normal headway is incompatible with the truncation range");
    }
  }
}

std::span<const StepRecord> SimTrace::step(int k) const
{
  const std::size_t n = ids.size();
  return std::span<const StepRecord>(steps).subspan(static_cast<std::size_t>(k) * n, n);
}

std::string SimTrace::av_follower() const
{
  const auto idx = static_cast<std::size_t>(av_final_index);
  return idx + 1 < final_order.size() ? final_order[idx + 1] : std::string{};
}

std::string SimTrace::av_leader() const
{
  return av_final_index > 0 ? final_order[static_cast<std::size_t>(av_final_index) - 1] : std::string{};
}

double style_from_headway(double headway) { return std::clamp((2.5 - headway) / 2.0, 0.05, 0.95); }

Maneuver decide(const std::optional<StrategyState> & profile, const std::string & opponent)
{
  Maneuver m;
  m.target_id = opponent;
  m.kind = profile && profile->p < profile->q ? Maneuver::Kind::MergeAhead : Maneuver::Kind::YieldAndShift;
  return m;
}

Maneuver decide(const EquilibriumReport & report, const std::string & opponent)
{
  return decide(report.ess, opponent);
}

double merge_control(const GameContext & ctx, const Maneuver & m)
{
  const double opponent_time = ctx.mv.dist_to_merge / std::max(ctx.mv.speed, kMinGameSpeed);
  double t = m.kind == Maneuver::Kind::MergeAhead ? opponent_time - ctx.headway_T : opponent_time + ctx.headway_T;
  t = std::max(t, kMinArrivalTime);
  const double u = required_avg_accel(ctx.av.dist_to_merge, ctx.av.speed, t);
  return std::clamp(u, kMaxControlDecel, kMaxControlAccel);
}

LaneChangeResult execute_lane_change(
  const VehicleState & av, const VehicleState * front, const VehicleState * rear, double min_gap)
{
  const bool front_ok = front == nullptr || bumper_gap(*front, av) >= min_gap;
  const bool rear_ok = rear == nullptr || bumper_gap(av, *rear) >= min_gap;
  if (!front_ok || !rear_ok) {
    return {av, true};
  }
  VehicleState out = av;
  out.lane = Lane::Main;
  return {out, false};
}

SimTrace run_scenario(const SimConfig & cfg, Policy policy)
{
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);

  SimTrace trace;
  trace.dt = cfg.dt;
  trace.n_steps = cfg.steps();
  trace.av_id = cfg.av.id;

  std::vector<VehicleState> veh;
  std::vector<IdmParams> idm;
  for (const auto & spec : cfg.vehicles) {
    const double headway = spec.headway.sample(rng);
    trace.headways[spec.id] = headway;
    trace.true_omega[spec.id] = style_from_headway(headway);
    veh.push_back({spec.id, spec.lane, cfg.road.s_merge - spec.d, spec.v, 0.0, spec.length});
    IdmParams p = cfg.idm;
    p.T = headway;
    idm.push_back(p);
  }
  veh.push_back({cfg.av.id, cfg.av.lane, cfg.road.s_merge - cfg.av.d, cfg.av.v, 0.0, cfg.av.length});
  IdmParams av_idm = cfg.idm;
  av_idm.T = cfg.av.idm_headway;
  idm.push_back(av_idm);
  const std::size_t av_idx = veh.size() - 1;
  for (const auto & x : veh) {
    trace.ids.push_back(x.id);
    trace.lengths.push_back(x.length);
  }

  // An AV configured on the main lane has nothing to merge into.
  bool merged = veh[av_idx].lane == Lane::Main;
  if (merged) {
    trace.av_merged = true;
    trace.merge_time = 0.0;
  }

  std::map<std::string, StyleBelief> beliefs;
  std::set<std::string> conceded;
  Maneuver maneuver;

  struct Pending
  {
    std::string opponent;
    GameContext ctx;
    StrategyState profile;
    double speed_at_decision{0.0};
  };
  std::optional<Pending> pending;
  bool requeue_flagged = false;

  // Steady-state accelerations before the first game.
  std::vector<double> applied(veh.size(), 0.0);
  for (std::size_t i = 0; i < av_idx; ++i) {
    applied[i] = follow_accel(idm[i], veh[i], leader_of(veh, veh[i]));
  }

  const int n_steps = trace.n_steps;
  const int per_decision = cfg.steps_per_decision();
  trace.steps.reserve(static_cast<std::size_t>(n_steps) * veh.size());

  for (int k = 0; k < n_steps; ++k) {
    const double t = k * cfg.dt;
    VehicleState & av = veh[av_idx];

    // Simplified lane change inside the convergence area.
    if (!merged && av.s >= cfg.road.s_merge) {
      const VehicleState * front = nearest_ahead(veh, Lane::Main, av.s, av.id);
      const VehicleState * rear = nearest_behind(veh, Lane::Main, av.s, av.id);
      bool consistent = true;
      if (!maneuver.target_id.empty()) {
        const auto j = index_of(veh, maneuver.target_id);
        if (j < veh.size()) {
          consistent = maneuver.kind == Maneuver::Kind::MergeAhead ? veh[j].s < av.s : veh[j].s > av.s;
        }
      }
      if (consistent) {
        const auto result = execute_lane_change(av, front, rear, cfg.idm.s0);
        if (!result.requeue) {
          av = result.av;
          merged = true;
          maneuver.committed = true;
          trace.av_merged = true;
          trace.merge_time = t;
        } else if (maneuver.kind == Maneuver::Kind::MergeAhead && !requeue_flagged) {
          maneuver.kind = Maneuver::Kind::YieldAndShift;
          requeue_flagged = true;
          ++trace.requeues;
        }
      }
    }

    if (!merged && k % per_decision == 0) {
      const auto queue = merging_list(veh, cfg.road);
      const int av_pos = queue.priority_of(av.id);

      if (maneuver.kind == Maneuver::Kind::YieldAndShift && !maneuver.target_id.empty() &&
          queue.priority_of(maneuver.target_id) < av_pos && beliefs.count(maneuver.target_id) > 0) {
        conceded.insert(maneuver.target_id);
      }

      DecisionRecord rec;
      rec.step = k;
      rec.t = t;
      rec.av_priority = av_pos;

      if (pending) {
        const auto j = index_of(veh, pending->opponent);
        const auto reaction = observed_reaction(veh[j].v, pending->speed_at_decision);
        auto & b = beliefs[pending->opponent];
        const auto next =
          update_belief(b, pending->profile, reaction, pending->ctx, cfg.branch_reading, policy);
        rec.belief_updated = next.k_l != b.k_l || next.k_u != b.k_u;
        b = next;
        pending.reset();
      }

      // Opponent: first MV behind the AV in the list that has not been
      // conceded and is not ahead of a conceded one.
      int start = av_pos;
      for (const auto & c : conceded) {
        start = std::max(start, queue.priority_of(c));
      }
      std::string opponent;
      for (int pos = start; pos < static_cast<int>(queue.order.size()); ++pos) {
        const auto & id = queue.order[static_cast<std::size_t>(pos)];
        if (id != av.id && conceded.count(id) == 0) {
          opponent = id;
          break;
        }
      }
      for (int pos = av_pos; pos < start; ++pos) {
        const auto & id = queue.order[static_cast<std::size_t>(pos) - 1];
        if (id != av.id && pos > av_pos) {
          conceded.insert(id);
        }
      }

      if (!opponent.empty()) {
        const auto & mv = veh[index_of(veh, opponent)];
        auto & b = beliefs[opponent];
        const auto ctx = make_context(cfg, av, mv, b.omega_hat);
        const auto m = build_matrix(ctx);
        const auto report = solve_ess(m);
        const auto profile = equilibrium_profile(m, policy);
        maneuver = decide(profile, opponent);
        requeue_flagged = false;
        rec.opponent = opponent;
        rec.has_profile = profile.has_value();
        rec.profile = profile.value_or(StrategyState{});
        rec.multiple_stable = report.multiple_stable;
        rec.belief = b;
        rec.planned_s_end = planned_end(cfg, av, mv, maneuver);
        if (profile) {
          pending = Pending{opponent, ctx, *profile, mv.v};
        }
      } else {
        // Nobody left behind: slot in after the last vehicle ahead.
        maneuver = Maneuver{};
        if (av_pos > 1) {
          maneuver.target_id = queue.order[static_cast<std::size_t>(av_pos) - 2];
          if (maneuver.target_id == av.id) {
            maneuver.target_id.clear();
          }
        }
        if (maneuver.target_id.empty()) {
          maneuver.kind = Maneuver::Kind::MergeAhead;
        }
        rec.planned_s_end = av.s + av.v * cfg.horizon * cfg.decision_period;
      }
      rec.maneuver = maneuver;
      rec.conceded = static_cast<int>(conceded.size());
      trace.decisions.push_back(rec);
    }

    // Controls.
    std::vector<double> u(veh.size(), 0.0);
    for (std::size_t i = 0; i < av_idx; ++i) {
      const auto & self = veh[i];
      const VehicleState * leader = leader_of(veh, self);
      double target = follow_accel(idm[i], self, leader);
      const bool virtual_leader = !merged && maneuver.kind == Maneuver::Kind::MergeAhead &&
                                  maneuver.target_id == self.id && av.s > self.s &&
                                  bumper_gap(av, self) > 0.0;
      if (virtual_leader) {
        target = std::min(target, idm_accel(idm[i], self.v, bumper_gap(av, self), self.v - av.v));
      }
      double a = target;
      if (cfg.mv_response_lag > 0.0) {
        a = applied[i] + std::min(1.0, cfg.dt / cfg.mv_response_lag) * (target - applied[i]);
      }
      u[i] = std::clamp(a, -kIdmEmergencyDecel, idm[i].a_max);
    }

    if (merged) {
      u[av_idx] = follow_accel(av_idm, av, leader_of(veh, av));
    } else {
      double cmd = 0.0;
      const auto j = maneuver.target_id.empty() ? veh.size() : index_of(veh, maneuver.target_id);
      if (av.s >= cfg.road.s_merge) {
        // Past the merge point the arrival law degenerates; track the gap.
        const VehicleState * gap_front = nullptr;
        if (j < veh.size()) {
          gap_front = maneuver.kind == Maneuver::Kind::YieldAndShift
                        ? &veh[j]
                        : nearest_ahead(veh, Lane::Main, veh[j].s + 1e-6, veh[j].id);
        }
        if (gap_front == nullptr) {
          cmd = idm_accel(av_idm, av.v, kFreeRoadGap, 0.0);
        } else if (gap_front->s > av.s) {
          const double gap = std::max(bumper_gap(*gap_front, av), 0.1);
          cmd = idm_accel(av_idm, av.v, gap, av.v - gap_front->v);
        } else {
          cmd = -av_idm.b;
        }
      } else if (j < veh.size()) {
        cmd = merge_control(make_context(cfg, av, veh[j], 0.5), maneuver);
      } else {
        cmd = idm_accel(av_idm, av.v, kFreeRoadGap, 0.0);
      }
      // End of the acceleration lane acts as a standing obstacle.
      const double to_end = cfg.road.convergence_end - av.s - 0.5 * av.length;
      cmd = std::min(cmd, to_end > 0.0 ? idm_accel(av_idm, av.v, to_end, av.v) : kMaxControlDecel);
      u[av_idx] = std::clamp(cmd, kMaxControlDecel, kMaxControlAccel);
    }

    for (std::size_t i = 0; i < veh.size(); ++i) {
      trace.steps.push_back({t, veh[i].id, veh[i].lane, veh[i].s, veh[i].v, u[i]});
    }
    for (std::size_t i = 0; i < veh.size(); ++i) {
      veh[i] = step_kinematics(veh[i], u[i], cfg.dt);
      applied[i] = u[i];
    }
    for (const auto & [a, b] : check_collision(veh)) {
      trace.collisions.push_back({t + cfg.dt, a, b});
    }
  }

  std::vector<std::size_t> order(veh.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return veh[a].s > veh[b].s; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    trace.final_order.push_back(veh[order[i]].id);
    if (order[i] == av_idx) {
      trace.av_final_index = static_cast<int>(i);
    }
  }
  return trace;
}

}  // namespace merge_egt
