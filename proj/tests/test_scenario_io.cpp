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

#include <algorithm>
#include <sstream>
#include <string>

#include "doctest.h"
#include "merge_egt/scenario_io.hpp"

using namespace merge_egt;

namespace
{

const char * kMinimal = R"(# two cars
[sim]
duration = 5
dt = 0.1
decision_period = 1
horizon = 5

[av]
d = 90
v = 9

[vehicle]
id = A
d = 120   # behind
v = 10
headway = normal:1.2,0.3
)";

int error_line(const std::string & text)
{
  std::istringstream in(text);
  try {
    parse_scenario(in);
  } catch (const ConfigError & e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal file")
{
  std::istringstream in(kMinimal);
  const auto cfg = parse_scenario(in);
  CHECK(cfg.duration == 5.0);
  CHECK(cfg.av.d == 90.0);
  CHECK(cfg.av.lane == Lane::Ramp);
  REQUIRE(cfg.vehicles.size() == 1);
  CHECK(cfg.vehicles[0].id == "A");
  CHECK(cfg.vehicles[0].lane == Lane::Main);
  CHECK(cfg.vehicles[0].d == 120.0);
  CHECK(cfg.vehicles[0].headway.kind == HeadwaySpec::Kind::Normal);
  CHECK(cfg.vehicles[0].headway.mean == 1.2);
  CHECK(cfg.vehicles[0].headway.sigma == 0.3);
}

TEST_CASE("shipped scenarios")
{
  for (int n = 1; n <= 3; ++n) {
    const auto cfg = load_scenario(std::string(MERGE_EGT_SCENARIO_DIR) + "/scenario_" + std::to_string(n) + ".cfg");
    CHECK(cfg.vehicles.size() == 5);
    CHECK(cfg.av.d == 100.0);
    CHECK(cfg.duration == 10.0);
  }
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("round trip")
{
  std::istringstream in(kMinimal);
  const auto cfg = parse_scenario(in);
  std::ostringstream out;
  write_scenario(out, cfg);
  std::istringstream back(out.str());
  const auto again = parse_scenario(back);
  std::ostringstream out2;
  write_scenario(out2, again);
  CHECK(out.str() == out2.str());
}

TEST_CASE("errors carry line numbers")
{
  const std::string base = kMinimal;
  CHECK(error_line(base + "color = red\n") == 17);
  CHECK(error_line("[sim]\nspeed = 3\n") == 2);
  CHECK(error_line("[weather]\n") == 1);
  CHECK(error_line("dt = 0.1\n") == 1);
  CHECK(error_line("[sim]\ndt = fast\n") == 2);
  CHECK(error_line("[sim]\ndt = 0.1\ndt = 0.2\n") == 3);
  CHECK(error_line("[sim]\n[sim]\n") == 2);
  CHECK(error_line("[sim\n") == 1);
  CHECK(error_line("[sim]\njust words\n") == 2);
  CHECK(error_line("[sim]\nhorizon = 2.5\n") == 2);
  CHECK(error_line("[av]\nlane = shoulder\n") == 2);
  CHECK(error_line("[vehicle]\nid = A\nd = 1\nv = 1\nheadway = uniform:1,2\n") == 5);
  CHECK(error_line("[vehicle]\nid = A\nd = 1\nv = 1\nheadway = fixed:-1\n") == 5);
  CHECK(error_line("[vehicle]\nid = A\nd = 1\nv = 1\n") == 1);
  // Consistency problems are not tied to one line.
  CHECK(error_line("[sim]\ndt = 0.3\n[vehicle]\nid = A\nd = 1\nv = 1\nheadway = fixed:1\n") == 0);
  CHECK(error_line("[sim]\n") == 0);
}

TEST_CASE("headway strings")
{
  CHECK(parse_headway("fixed:2").mean == 2.0);
  CHECK(parse_headway("normal: 1 , 0.5").sigma == 0.5);
  CHECK_THROWS(parse_headway("2"));
  CHECK_THROWS(parse_headway("normal:1"));
  CHECK_THROWS(parse_headway("normal:1,-2"));
  CHECK(format_headway(parse_headway("normal:1,0.5")) == "normal:1,0.5");
}

TEST_CASE("number formatting")
{
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(-2.5e-7) == "-2.5e-07");
}

TEST_CASE("trace csv")
{
  auto cfg = load_scenario(std::string(MERGE_EGT_SCENARIO_DIR) + "/scenario_1.cfg");
  cfg.seed = 1;
  const auto trace = run_scenario(cfg);
  std::ostringstream out;
  write_trace_csv(out, trace);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,id,lane,s,v,a,decision,p_star,q_star,k_l,k_u,omega_hat");
  int rows = 0, decisions = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 11);
    if (line.find("merge_ahead") != std::string::npos || line.find("yield_and_shift") != std::string::npos) {
      ++decisions;
      CHECK(line.find(",AV,") != std::string::npos);
    }
  }
  CHECK(rows == 100 * 6);
  CHECK(decisions == static_cast<int>(trace.decisions.size()));
}

TEST_CASE("summaries are key=value lines")
{
  auto cfg = load_scenario(std::string(MERGE_EGT_SCENARIO_DIR) + "/scenario_2.cfg");
  const auto s = run_batch(cfg, 3, 1, Policy::Egt);
  std::ostringstream out;
  write_batch_summary(out, s, Policy::Egt, 1);
  std::istringstream in(out.str());
  std::string line;
  while (std::getline(in, line)) {
    CHECK(line.find('=') != std::string::npos);
  }
  CHECK(out.str().find("n_runs=3\n") != std::string::npos);
  CHECK(out.str().find("collision_rate=") != std::string::npos);
}
