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

#ifndef MERGE_EGT__METRICS_HPP_
#define MERGE_EGT__METRICS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "merge_egt/baselines.hpp"
#include "merge_egt/decision_runner.hpp"

namespace merge_egt
{

inline constexpr double kTtcCap = 10.0;  // s

struct MetricsOptions
{
  double ttc_cap{kTtcCap};
  std::string terminal_vehicle{"MV5"};
};

struct MetricsReport
{
  double mean_jerk{0.0};  // m/s^3, over every MV and step
  double max_jerk{0.0};
  double terminal_speed{0.0};  // m/s, last record of the terminal vehicle
  bool collided{false};
  double mean_ttc{kTtcCap};
  std::size_t ttc_samples{0};
  // No closing pair was ever observed, mean_ttc is the cap.
  bool ttc_undefined{true};
};

/// Throws std::invalid_argument for traces shorter than two steps.
MetricsReport compute_metrics(const SimTrace & trace, const MetricsOptions & opts = {});

struct RunOutcome
{
  std::uint64_t seed{0};
  bool ok{false};
  std::string error;
  MetricsReport metrics;
  std::string av_leader;    // vehicle directly ahead of the AV at the end
  std::string av_follower;  // vehicle directly behind
  bool av_merged{false};
  std::vector<std::string> final_order;  // downstream first
};

struct MetricStats
{
  double mean{0.0};
  double stddev{0.0};  // population
};

struct BatchSummary
{
  int n_runs{0};
  int n_failed{0};
  MetricStats mean_jerk;
  MetricStats max_jerk;
  MetricStats terminal_speed;
  MetricStats mean_ttc;
  double collision_rate{0.0};  // percent of successful runs
  int n_merged{0};             // runs where the AV completed the lane change
  std::map<std::string, int> follower_counts;
  std::vector<RunOutcome> runs;  // ordered by seed
};

/// Aggregates outcomes in the given order. Failed runs are counted, not averaged.
BatchSummary summarize(const std::vector<RunOutcome> & runs);

/// Seeds base_seed .. base_seed + n - 1. `threads` <= 1 runs serially; the
/// result is independent of the thread count.
BatchSummary run_batch(
  const SimConfig & cfg, int n, std::uint64_t base_seed, Policy policy, int threads = 1,
  const MetricsOptions & opts = {});

}  // namespace merge_egt

#endif  // MERGE_EGT__METRICS_HPP_
