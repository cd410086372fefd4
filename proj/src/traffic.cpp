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

#include "merge_egt/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace merge_egt
{

const char * to_string(Lane lane) { return lane == Lane::Main ? "main" : "ramp"; }

bool IdmParams::is_valid() const
{
  return v0 > 0.0 && T > 0.0 && a_max > 0.0 && b > 0.0 && s0 > 0.0 && delta >= 1.0;
}

int PriorityQueue::priority_of(const std::string & id) const
{
  const auto it = std::find(order.begin(), order.end(), id);
  return it == order.end() ? 0 : static_cast<int>(it - order.begin()) + 1;
}

VehicleState step_kinematics(const VehicleState & state, double u, double dt)
{
  VehicleState next = state;
  next.s = state.s + dt * state.v;
  next.v = std::max(0.0, state.v + dt * u);
  next.a = u;
  return next;
}

double idm_accel(const IdmParams & p, double v, double gap, double dv)
{
  if (!(gap > 0.0)) {
    throw std::domain_error("idm_accel: non-positive gap (vehicles overlap)");
  }
  const double desired = p.s0 + std::max(0.0, v * p.T + v * dv / (2.0 * std::sqrt(p.a_max * p.b)));
  const double free_term = std::pow(v / p.v0, p.delta);
  const double interaction = (desired / gap) * (desired / gap);
  const double a = p.a_max * (1.0 - free_term - interaction);
  return std::clamp(a, -kIdmEmergencyDecel, p.a_max);
}

double idm_equilibrium_gap(const IdmParams & p, double v)
{
  const double free_term = std::pow(v / p.v0, p.delta);
  if (free_term >= 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  return (p.s0 + v * p.T) / std::sqrt(1.0 - free_term);
}

double bumper_gap(const VehicleState & leader, const VehicleState & follower)
{
  return leader.s - follower.s - 0.5 * (leader.length + follower.length);
}

PriorityQueue merging_list(std::span<const VehicleState> states, const RoadGeometry & road)
{
  std::vector<std::size_t> idx(states.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto arrival = [&](const VehicleState & x) {
    const double d = road.dist_to_merge(x.s);
    if (x.v > 0.0) {
      return d / x.v;
    }
    // Stopped short of the merge point never arrives; past it, already there.
    return d > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    const double ti = arrival(states[i]);
    const double tj = arrival(states[j]);
    if (ti != tj) {
      return ti < tj;
    }
    const bool mi = states[i].lane == Lane::Main;
    const bool mj = states[j].lane == Lane::Main;
    if (mi != mj) {
      return mi;
    }
    return states[i].id < states[j].id;
  });
  PriorityQueue q;
  q.order.reserve(states.size());
  for (auto i : idx) {
    q.order.push_back(states[i].id);
  }
  return q;
}

std::vector<std::pair<std::string, std::string>> check_collision(std::span<const VehicleState> states)
{
  std::vector<std::pair<std::string, std::string>> hits;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      const auto & a = states[i];
      const auto & b = states[j];
      if (a.lane != b.lane) {
        continue;
      }
      if (std::abs(a.s - b.s) < 0.5 * (a.length + b.length)) {
        hits.emplace_back(a.id, b.id);
      }
    }
  }
  return hits;
}

const VehicleState * nearest_ahead(
  std::span<const VehicleState> states, Lane lane, double s, const std::string & exclude_id)
{
  const VehicleState * best = nullptr;
  for (const auto & x : states) {
    if (x.id == exclude_id || x.lane != lane || x.s < s) {
      continue;
    }
    if (best == nullptr || x.s < best->s) {
      best = &x;
    }
  }
  return best;
}

const VehicleState * nearest_behind(
  std::span<const VehicleState> states, Lane lane, double s, const std::string & exclude_id)
{
  const VehicleState * best = nullptr;
  for (const auto & x : states) {
    if (x.id == exclude_id || x.lane != lane || x.s >= s) {
      continue;
    }
    if (best == nullptr || x.s > best->s) {
      best = &x;
    }
  }
  return best;
}

const VehicleState * leader_of(std::span<const VehicleState> states, const VehicleState & self)
{
  const VehicleState * best = nullptr;
  for (const auto & x : states) {
    if (x.id == self.id || x.lane != self.lane || x.s <= self.s) {
      continue;
    }
    if (best == nullptr || x.s < best->s) {
      best = &x;
    }
  }
  return best;
}

}  // namespace merge_egt
