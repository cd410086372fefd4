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

#ifndef MERGE_EGT__TRAFFIC_HPP_
#define MERGE_EGT__TRAFFIC_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace merge_egt
{

/// Shared arc-length frame. The ramp runs parallel to the main road.
struct RoadGeometry
{
  double s_merge{200.0};
  double merge_area_start{120.0};
  double convergence_end{260.0};

  double dist_to_merge(double s) const { return s_merge - s; }
  bool in_convergence_area(double s) const { return s >= s_merge && s <= convergence_end; }
};

enum class Lane { Main, Ramp };

const char * to_string(Lane lane);

struct VehicleState
{
  std::string id;
  Lane lane{Lane::Main};
  double s{0.0};  // m, center position
  double v{0.0};  // m/s
  double a{0.0};  // m/s^2
  double length{5.0};
};

struct IdmParams
{
  double v0{15.0};
  double T{1.5};
  double a_max{1.5};
  double b{2.0};
  double s0{2.0};
  double delta{4.0};

  bool is_valid() const;
};

inline constexpr double kIdmEmergencyDecel = 8.0;  // m/s^2
inline constexpr double kFreeRoadGap = 1e6;        // m

/// Vehicle ids ordered by priority, index 0 = highest.
struct PriorityQueue
{
  std::vector<std::string> order;

  /// 1-based priority of `id`, 0 if absent.
  int priority_of(const std::string & id) const;
};

/// One step of the discrete double integrator with a v >= 0 clamp.
VehicleState step_kinematics(const VehicleState & state, double u, double dt);

/// Standard IDM law clamped to [-kIdmEmergencyDecel, a_max]. `dv` is the
/// approach rate (own speed minus leader speed). Throws std::domain_error for
/// gap <= 0.
double idm_accel(const IdmParams & p, double v, double gap, double dv);

/// Gap at which a follower at speed v behind an equal-speed leader has a = 0.
double idm_equilibrium_gap(const IdmParams & p, double v);

/// Bumper-to-bumper distance from `follower` to `leader`.
double bumper_gap(const VehicleState & leader, const VehicleState & follower);

/// Order by projected arrival d/v; ties: Main lane first, then id.
PriorityQueue merging_list(std::span<const VehicleState> states, const RoadGeometry & road = {});

std::vector<std::pair<std::string, std::string>> check_collision(std::span<const VehicleState> states);

/// Nearest same-lane vehicle strictly ahead of `self`, or nullptr.
const VehicleState * leader_of(std::span<const VehicleState> states, const VehicleState & self);

/// Nearest vehicle in `lane` ahead of / behind arc-length position `s`,
/// skipping `exclude_id`.
const VehicleState * nearest_ahead(
  std::span<const VehicleState> states, Lane lane, double s, const std::string & exclude_id);
const VehicleState * nearest_behind(
  std::span<const VehicleState> states, Lane lane, double s, const std::string & exclude_id);

}  // namespace merge_egt

#endif  // MERGE_EGT__TRAFFIC_HPP_
