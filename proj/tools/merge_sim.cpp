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

// merge_sim: run, batch and style-estimation front end.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "merge_egt/metrics.hpp"
#include "merge_egt/scenario_io.hpp"
#include "merge_egt/style_estimation.hpp"

namespace fs = std::filesystem;
using namespace merge_egt;

namespace
{

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::ofstream open_out(const fs::path & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"On-ramp merging simulator with an evolutionary-game decision layer"};
  app.require_subcommand(1);

  std::string scenario;
  std::uint64_t seed = 0;
  std::string policy_name = "egt";
  std::string out_dir;
  bool trace_csv = false;
  int runs = 100;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double true_omega = 0.5;

  const std::vector<std::string> policies{"egt", "nash", "stackelberg"};

  auto * run = app.add_subcommand("run", "Simulate one seeded scenario");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--seed", seed, "RNG seed")->required();
  run->add_option("--policy", policy_name, "Decision policy")->check(CLI::IsMember(policies));
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--trace", trace_csv, "Also write trace.csv");

  auto * batch = app.add_subcommand("batch", "Simulate seeds base-seed .. base-seed + runs - 1");
  batch->add_option("--scenario", scenario, "Scenario file")->required();
  batch->add_option("--runs", runs, "Number of runs")->required()->check(CLI::PositiveNumber);
  batch->add_option("--base-seed", seed, "First seed")->required();
  batch->add_option("--policy", policy_name, "Decision policy")->check(CLI::IsMember(policies));
  batch->add_option("--out", out_dir, "Output directory")->required();
  batch->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto * estimate = app.add_subcommand("estimate", "Style-estimation testbench against a truthful MV");
  estimate->add_option("--scenario", scenario, "Scenario file (AV state and style)")->required();
  estimate->add_option("--true-omega", true_omega, "True MV style")->required()->check(CLI::Range(0.0, 1.0));
  estimate->add_option("--seed", seed, "Probe jitter seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    // Usage errors share the config-error exit code; --help stays 0.
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  SimConfig cfg;
  try {
    cfg = load_scenario(scenario);
  } catch (const ConfigError & e) {
    std::cerr << scenario << ": " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const Policy policy = parse_policy(policy_name);
    if (*run) {
      cfg.seed = seed;
      const auto trace = run_scenario(cfg, policy);
      const auto metrics = compute_metrics(trace);
      fs::create_directories(out_dir);
      auto summary = open_out(fs::path(out_dir) / "summary.txt");
      summary << "seed=" << seed << "\n";
      write_run_summary(summary, trace, metrics, policy);
      if (trace_csv) {
        auto csv = open_out(fs::path(out_dir) / "trace.csv");
        write_trace_csv(csv, trace);
      }
      std::cout << "av_leader=" << trace.av_leader() << " av_follower=" << trace.av_follower()
                << " collided=" << (metrics.collided ? 1 : 0) << "\n";
    } else if (*batch) {
      const auto s = run_batch(cfg, runs, seed, policy, threads);
      fs::create_directories(out_dir);
      auto out = open_out(fs::path(out_dir) / "batch_summary.txt");
      write_batch_summary(out, s, policy, seed);
      std::cout << "runs=" << s.n_runs << " failed=" << s.n_failed
                << " collision_rate=" << format_number(s.collision_rate) << "\n";
      if (s.n_failed > 0) {
        return kExitRuntime;
      }
    } else if (*estimate) {
      ProbeSetup setup;
      setup.av = {cfg.av.d, cfg.av.v};
      setup.av_style = {cfg.av.omega, setup.av_style.headway};
      const auto r = run_probe_bench(true_omega, setup, seed);
      write_probe_result(std::cout, r, true_omega);
    }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
