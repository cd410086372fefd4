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

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "merge_egt/decision_runner.hpp"
#include "merge_egt/scenario_io.hpp"

using namespace merge_egt;

namespace
{

SimConfig scenario(int n)
{
  return load_scenario(std::string(MERGE_EGT_SCENARIO_DIR) + "/scenario_" + std::to_string(n) + ".cfg");
}

GameContext ctx(double d_av, double d_mv)
{
  GameContext c;
  c.av = {d_av, 10.0};
  c.mv = {d_mv, 10.0};
  c.av_style = {0.5, 2.0};
  c.mv_style = {0.5, 2.0};
  c.headway_T = 2.0;
  return c;
}

Maneuver kind(Maneuver::Kind k)
{
  Maneuver m;
  m.kind = k;
  return m;
}

}  // namespace

TEST_CASE("decision mapping")
{
  CHECK(decide(StrategyState{0.0, 1.0}, "MV3").kind == Maneuver::Kind::MergeAhead);
  CHECK(decide(StrategyState{0.0, 1.0}, "MV3").target_id == "MV3");
  for (const auto & s : {StrategyState{1.0, 0.0}, StrategyState{0.0, 0.0}, StrategyState{1.0, 1.0}}) {
    CHECK(decide(s, "MV3").kind == Maneuver::Kind::YieldAndShift);
  }
  CHECK(decide(std::nullopt, "MV3").kind == Maneuver::Kind::YieldAndShift);
  EquilibriumReport none;
  CHECK(decide(none, "x").kind == Maneuver::Kind::YieldAndShift);
}

TEST_CASE("arrival-law control")
{
  const auto c = ctx(80.0, 100.0);
  CHECK(merge_control(c, kind(Maneuver::Kind::MergeAhead)) == doctest::Approx(0.0));
  // t = 12 s: 2 (80 - 120) / 144
  CHECK(merge_control(c, kind(Maneuver::Kind::YieldAndShift)) == doctest::Approx(-80.0 / 144.0));
  CHECK(merge_control(ctx(80.0, 10.0), kind(Maneuver::Kind::MergeAhead)) == kMaxControlAccel);
  CHECK(merge_control(ctx(0.0, 100.0), kind(Maneuver::Kind::YieldAndShift)) >= kMaxControlDecel);
}

TEST_CASE("lane change feasibility")
{
  const VehicleState av{"AV", Lane::Ramp, 210.0, 10.0, 0.0, 5.0};
  const VehicleState front{"F", Lane::Main, 230.0, 10.0, 0.0, 5.0};
  const VehicleState rear{"R", Lane::Main, 190.0, 10.0, 0.0, 5.0};
  const auto ok = execute_lane_change(av, &front, &rear, 2.0);
  CHECK_FALSE(ok.requeue);
  CHECK(ok.av.lane == Lane::Main);

  const VehicleState close{"R", Lane::Main, 206.5, 10.0, 0.0, 5.0};
  const auto blocked = execute_lane_change(av, &front, &close, 2.0);
  CHECK(blocked.requeue);
  CHECK(blocked.av.lane == Lane::Ramp);

  const auto alone = execute_lane_change(av, nullptr, &rear, 2.0);
  CHECK_FALSE(alone.requeue);
  CHECK(alone.av.lane == Lane::Main);
}

TEST_CASE("headway sampling and style mapping")
{
  CHECK(style_from_headway(0.5) == doctest::Approx(0.95));
  CHECK(style_from_headway(1.5) == doctest::Approx(0.5));
  CHECK(style_from_headway(3.0) == doctest::Approx(0.05));

  HeadwaySpec fixed;
  fixed.mean = 1.7;
  std::mt19937_64 rng(1);
  CHECK(fixed.sample(rng) == 1.7);

  HeadwaySpec normal{HeadwaySpec::Kind::Normal, 1.0, 0.5};
  for (int i = 0; i < 2000; ++i) {
    const double h = normal.sample(rng);
    CHECK(h >= HeadwaySpec::kMin);
    CHECK(h <= HeadwaySpec::kMax);
  }
}

TEST_CASE("config validation")
{
  auto cfg = scenario(1);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.steps() == 100);
  CHECK(cfg.steps_per_decision() == 10);

  auto bad = cfg;
  bad.dt = 0.3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.horizon = 20;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.vehicles.push_back(bad.vehicles.front());
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.vehicles.clear();
  CHECK_THROWS_AS(run_scenario(bad), std::invalid_argument);
  bad = cfg;
  bad.av.omega = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trace shape and determinism")
{
  for (int n = 1; n <= 3; ++n) {
    auto cfg = scenario(n);
    cfg.seed = 5;
    const auto a = run_scenario(cfg);
    const auto b = run_scenario(cfg);
    CHECK(a.n_steps == 100);
    CHECK(a.steps.size() == 100 * a.ids.size());
    CHECK(a.ids.back() == "AV");
    CHECK(a.final_order == b.final_order);
    REQUIRE(a.steps.size() == b.steps.size());
    bool same = true;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      same = same && a.steps[i].s == b.steps[i].s && a.steps[i].v == b.steps[i].v && a.steps[i].a == b.steps[i].a;
    }
    CHECK(same);
    CHECK(a.decisions.size() <= 10);
    CHECK(a.final_order[static_cast<std::size_t>(a.av_final_index)] == "AV");
  }
}

TEST_CASE("runner invariants over seeds")
{
  for (int n = 1; n <= 3; ++n) {
    auto cfg = scenario(n);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      cfg.seed = seed;
      const auto tr = run_scenario(cfg);
      CHECK(tr.collisions.empty());
      int conceded = 0;
      for (const auto & d : tr.decisions) {
        CHECK(d.conceded >= conceded);
        conceded = d.conceded;
        if (d.maneuver.kind == Maneuver::Kind::MergeAhead && !d.opponent.empty()) {
          CHECK(d.maneuver.target_id == d.opponent);
        }
        CHECK(d.belief.k_l <= d.belief.k_u);
      }
      // Beliefs per opponent never widen.
      std::map<std::string, double> width;
      for (const auto & d : tr.decisions) {
        if (d.opponent.empty()) {
          continue;
        }
        const auto it = width.find(d.opponent);
        if (it != width.end()) {
          CHECK(d.belief.width() <= it->second);
        }
        width[d.opponent] = d.belief.width();
      }
      for (int k = 0; k < tr.n_steps; ++k) {
        for (const auto & r : tr.step(k)) {
          CHECK(r.v >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("first decision of scenario I")
{
  auto cfg = scenario(1);
  cfg.seed = 0;
  const auto tr = run_scenario(cfg);
  REQUIRE_FALSE(tr.decisions.empty());
  const auto & d = tr.decisions.front();
  CHECK(d.step == 0);
  CHECK(d.av_priority == 3);
  CHECK(d.opponent == "MV3");
  CHECK(d.belief.omega_hat == 0.5);
  CHECK_FALSE(d.belief_updated);
}

TEST_CASE("default-seed outcomes")
{
  auto s1 = scenario(1);
  auto s2 = scenario(2);
  s1.seed = 0;
  s2.seed = 0;
  CHECK(run_scenario(s1).av_follower() == "MV2");
  CHECK(run_scenario(s2).av_follower() == "MV3");
}

TEST_CASE("baseline policies run")
{
  auto cfg = scenario(1);
  cfg.seed = 3;
  for (Policy p : {Policy::NashPure, Policy::StackelbergAvLeader}) {
    const auto tr = run_scenario(cfg, p);
    CHECK(tr.n_steps == 100);
  }
}
