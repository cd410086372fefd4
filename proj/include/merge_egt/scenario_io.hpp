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

#ifndef MERGE_EGT__SCENARIO_IO_HPP_
#define MERGE_EGT__SCENARIO_IO_HPP_

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "merge_egt/decision_runner.hpp"
#include "merge_egt/metrics.hpp"
#include "merge_egt/style_estimation.hpp"

namespace merge_egt
{

/// Malformed or inconsistent scenario file. `line` is 0 when the problem is
/// not tied to a single line.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(int line, const std::string & what);
  int line() const { return line_; }

private:
  int line_;
};

/// Grammar in docs/scenario_format.md. The result is validated.
SimConfig parse_scenario(std::istream & in);
SimConfig load_scenario(const std::string & path);

HeadwaySpec parse_headway(const std::string & text);
std::string format_headway(const HeadwaySpec & h);

/// Round-trips through parse_scenario.
void write_scenario(std::ostream & out, const SimConfig & cfg);

/// Nine significant digits, "%.9g".
std::string format_number(double x);

void write_trace_csv(std::ostream & out, const SimTrace & trace);
void write_run_summary(std::ostream & out, const SimTrace & trace, const MetricsReport & m, Policy policy);
void write_batch_summary(std::ostream & out, const BatchSummary & s, Policy policy, std::uint64_t base_seed);
void write_probe_result(std::ostream & out, const ProbeResult & r, double true_omega);

}  // namespace merge_egt

#endif  // MERGE_EGT__SCENARIO_IO_HPP_
