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

#include "merge_egt/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace merge_egt
{

namespace
{

MetricStats stats_of(const std::vector<double> & xs)
{
  MetricStats s;
  if (xs.empty()) {
    return s;
  }
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  s.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) {
    sq += (x - s.mean) * (x - s.mean);
  }
  s.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
  return s;
}

RunOutcome run_one(const SimConfig & base, std::uint64_t seed, Policy policy, const MetricsOptions & opts)
{
  RunOutcome out;
  out.seed = seed;
  try {
    SimConfig cfg = base;
    cfg.seed = seed;
    const auto trace = run_scenario(cfg, policy);
    out.metrics = compute_metrics(trace, opts);
    out.av_leader = trace.av_leader();
    out.av_follower = trace.av_follower();
    out.av_merged = trace.av_merged;
    out.final_order = trace.final_order;
    out.ok = true;
  } catch (const std::exception & e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace

MetricsReport compute_metrics(const SimTrace & trace, const MetricsOptions & opts)
{
  if (trace.n_steps < 2 || trace.ids.empty()) {
    throw std::invalid_argument("compute_metrics: trace needs at least two steps");
  }
  const std::size_t n_veh = trace.ids.size();
  std::vector<std::size_t> mv_cols;
  std::size_t av_col = n_veh;
  for (std::size_t c = 0; c < n_veh; ++c) {
    if (trace.ids[c] == trace.av_id) {
      av_col = c;
    } else {
      mv_cols.push_back(c);
    }
  }

  MetricsReport r;
  double jerk_sum = 0.0;
  std::size_t jerk_n = 0;
  for (int k = 1; k < trace.n_steps; ++k) {
    const auto now = trace.step(k);
    const auto prev = trace.step(k - 1);
    for (auto c : mv_cols) {
      const double j = std::abs(now[c].a - prev[c].a) / trace.dt;
      jerk_sum += j;
      ++jerk_n;
      r.max_jerk = std::max(r.max_jerk, j);
    }
  }
  r.mean_jerk = jerk_n > 0 ? jerk_sum / static_cast<double>(jerk_n) : 0.0;

  // Terminal vehicle: the named one, else the most downstream MV at t = 0.
  std::size_t term_col = n_veh;
  for (auto c : mv_cols) {
    if (trace.ids[c] == opts.terminal_vehicle) {
      term_col = c;
    }
  }
  if (term_col == n_veh && !mv_cols.empty()) {
    const auto first = trace.step(0);
    term_col = mv_cols.front();
    for (auto c : mv_cols) {
      if (first[c].s > first[term_col].s) {
        term_col = c;
      }
    }
  }
  if (term_col < n_veh) {
    r.terminal_speed = trace.step(trace.n_steps - 1)[term_col].v;
  }

  r.collided = !trace.collisions.empty();
  double ttc_sum = 0.0;
  std::vector<VehicleState> states(n_veh);
  for (int k = 0; k < trace.n_steps; ++k) {
    const auto rows = trace.step(k);
    for (std::size_t c = 0; c < n_veh; ++c) {
      const auto & row = rows[c];
      states[c] = {row.id, row.lane, row.s, row.v, row.a, c < trace.lengths.size() ? trace.lengths[c] : 5.0};
    }
    if (!check_collision(states).empty()) {
      r.collided = true;
    }
    if (av_col == n_veh) {
      continue;
    }
    const double av_s = states[av_col].s;
    for (auto c : mv_cols) {
      const auto & self = states[c];
      if (self.s >= av_s) {
        continue;
      }
      const VehicleState * leader = leader_of(states, self);
      if (leader == nullptr) {
        continue;
      }
      const double closing = self.v - leader->v;
      const double gap = bumper_gap(*leader, self);
      if (closing <= 0.0 || gap <= 0.0) {
        continue;
      }
      ttc_sum += std::min(gap / closing, opts.ttc_cap);
      ++r.ttc_samples;
    }
  }
  r.ttc_undefined = r.ttc_samples == 0;
  r.mean_ttc = r.ttc_undefined ? opts.ttc_cap : ttc_sum / static_cast<double>(r.ttc_samples);
  return r;
}

BatchSummary summarize(const std::vector<RunOutcome> & runs)
{
  BatchSummary s;
  s.n_runs = static_cast<int>(runs.size());
  s.runs = runs;
  std::vector<double> mj, xj, ts, ttc;
  int collided = 0;
  for (const auto & r : runs) {
    if (!r.ok) {
      ++s.n_failed;
      continue;
    }
    mj.push_back(r.metrics.mean_jerk);
    xj.push_back(r.metrics.max_jerk);
    ts.push_back(r.metrics.terminal_speed);
    ttc.push_back(r.metrics.mean_ttc);
    collided += r.metrics.collided ? 1 : 0;
    s.n_merged += r.av_merged ? 1 : 0;
    ++s.follower_counts[r.av_follower.empty() ? std::string("none") : r.av_follower];
  }
  s.mean_jerk = stats_of(mj);
  s.max_jerk = stats_of(xj);
  s.terminal_speed = stats_of(ts);
  s.mean_ttc = stats_of(ttc);
  const int ok = s.n_runs - s.n_failed;
  s.collision_rate = ok > 0 ? 100.0 * collided / ok : 0.0;
  return s;
}

BatchSummary run_batch(
  const SimConfig & cfg, int n, std::uint64_t base_seed, Policy policy, int threads, const MetricsOptions & opts)
{
  if (n < 1) {
    throw std::invalid_argument("run_batch: n must be >= 1");
  }
  std::vector<RunOutcome> runs(static_cast<std::size_t>(n));
  const int workers = std::clamp(threads, 1, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) {
      runs[static_cast<std::size_t>(i)] = run_one(cfg, base_seed + static_cast<std::uint64_t>(i), policy, opts);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          runs[static_cast<std::size_t>(i)] =
            run_one(cfg, base_seed + static_cast<std::uint64_t>(i), policy, opts);
        }
      });
    }
    for (auto & th : pool) {
      th.join();
    }
  }
  return summarize(runs);
}

}  // namespace merge_egt
