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

#include "merge_egt/scenario_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace merge_egt
{

namespace
{

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool to_double(const std::string & text, double & out)
{
  if (text.empty()) {
    return false;
  }
  errno = 0;
  char * end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

double number(int line, const std::string & key, const std::string & text)
{
  double x = 0.0;
  if (!to_double(text, x)) {
    throw ConfigError(line, "'" + key + "' expects a number, got '" + text + "'");
  }
  return x;
}

int integer(int line, const std::string & key, const std::string & text)
{
  const double x = number(line, key, text);
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    throw ConfigError(line, "'" + key + "' expects an integer, got '" + text + "'");
  }
  return static_cast<int>(x);
}

Lane lane_of(int line, const std::string & text)
{
  if (text == "main") {
    return Lane::Main;
  }
  if (text == "ramp") {
    return Lane::Ramp;
  }
  throw ConfigError(line, "lane must be 'main' or 'ramp', got '" + text + "'");
}

using Setter = std::function<void(int, const std::string &)>;

struct VehicleDraft
{
  VehicleSpec spec;
  std::set<std::string> seen;
  int line{0};
};

}  // namespace

ConfigError::ConfigError(int line, const std::string & what)
: std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

HeadwaySpec parse_headway(const std::string & text)
{
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("headway must be 'fixed:<x>' or 'normal:<mean>,<sigma>'");
  }
  const auto kind = trim(text.substr(0, colon));
  const auto args = trim(text.substr(colon + 1));
  HeadwaySpec h;
  if (kind == "fixed") {
    if (!to_double(args, h.mean) || !(h.mean > 0.0)) {
      throw std::invalid_argument("fixed headway needs a positive number");
    }
    h.kind = HeadwaySpec::Kind::Fixed;
    return h;
  }
  if (kind == "normal") {
    const auto comma = args.find(',');
    if (comma == std::string::npos || !to_double(trim(args.substr(0, comma)), h.mean) ||
        !to_double(trim(args.substr(comma + 1)), h.sigma) || h.sigma < 0.0) {
      throw std::invalid_argument("normal headway needs '<mean>,<sigma>' with sigma >= 0");
    }
    h.kind = HeadwaySpec::Kind::Normal;
    return h;
  }
  throw std::invalid_argument("unknown headway kind '" + kind + "'");
}

std::string format_headway(const HeadwaySpec & h)
{
  if (h.kind == HeadwaySpec::Kind::Fixed) {
    return "fixed:" + format_number(h.mean);
  }
  return "normal:" + format_number(h.mean) + "," + format_number(h.sigma);
}

std::string format_number(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

SimConfig parse_scenario(std::istream & in)
{
  SimConfig cfg;
  std::vector<VehicleDraft> drafts;

  std::map<std::string, std::map<std::string, Setter>> table;
  auto num = [](double & field) {
    return Setter([&field](int line, const std::string & v) { field = number(line, "value", v); });
  };
  table["sim"] = {
    {"duration", num(cfg.duration)},
    {"dt", num(cfg.dt)},
    {"decision_period", num(cfg.decision_period)},
    {"horizon", [&](int l, const std::string & v) { cfg.horizon = integer(l, "horizon", v); }},
    {"game_headway", num(cfg.game_headway)},
    {"mv_response_lag", num(cfg.mv_response_lag)},
    {"branch_reading",
     [&](int l, const std::string & v) {
       if (v == "pseudocode") {
         cfg.branch_reading = BranchReading::Pseudocode;
       } else if (v == "prose") {
         cfg.branch_reading = BranchReading::Prose;
       } else {
         throw ConfigError(l, "branch_reading must be 'pseudocode' or 'prose'");
       }
     }},
  };
  table["idm"] = {
    {"v0", num(cfg.idm.v0)},
    {"a_max", num(cfg.idm.a_max)},
    {"b", num(cfg.idm.b)},
    {"s0", num(cfg.idm.s0)},
    {"delta", num(cfg.idm.delta)},
  };
  table["road"] = {
    {"s_merge", num(cfg.road.s_merge)},
    {"merge_area_start", num(cfg.road.merge_area_start)},
    {"convergence_end", num(cfg.road.convergence_end)},
  };
  table["av"] = {
    {"id", [&](int, const std::string & v) { cfg.av.id = v; }},
    {"lane", [&](int l, const std::string & v) { cfg.av.lane = lane_of(l, v); }},
    {"d", num(cfg.av.d)},
    {"v", num(cfg.av.v)},
    {"omega", num(cfg.av.omega)},
    {"length", num(cfg.av.length)},
    {"idm_headway", num(cfg.av.idm_headway)},
  };
  const std::set<std::string> vehicle_keys{"id", "lane", "d", "v", "headway", "length"};

  std::string section;
  std::set<std::string> sections_seen;
  std::set<std::string> keys_seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const auto text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) {
      continue;
    }
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigError(line, "unterminated section header");
      }
      section = trim(text.substr(1, text.size() - 2));
      if (section == "vehicle") {
        drafts.push_back({});
        drafts.back().line = line;
      } else if (table.count(section) == 0) {
        throw ConfigError(line, "unknown section [" + section + "]");
      } else if (!sections_seen.insert(section).second) {
        throw ConfigError(line, "section [" + section + "] appears twice");
      }
      keys_seen.clear();
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "expected 'key = value'");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(line, "key '" + key + "' outside any section");
    }
    if (value.empty()) {
      throw ConfigError(line, "key '" + key + "' has no value");
    }

    if (section == "vehicle") {
      auto & d = drafts.back();
      if (vehicle_keys.count(key) == 0) {
        throw ConfigError(line, "unknown key '" + key + "' in [vehicle]");
      }
      if (!d.seen.insert(key).second) {
        throw ConfigError(line, "duplicate key '" + key + "'");
      }
      if (key == "id") {
        d.spec.id = value;
      } else if (key == "lane") {
        d.spec.lane = lane_of(line, value);
      } else if (key == "d") {
        d.spec.d = number(line, key, value);
      } else if (key == "v") {
        d.spec.v = number(line, key, value);
      } else if (key == "length") {
        d.spec.length = number(line, key, value);
      } else {
        try {
          d.spec.headway = parse_headway(value);
        } catch (const std::invalid_argument & e) {
          throw ConfigError(line, e.what());
        }
      }
      continue;
    }

    const auto & setters = table.at(section);
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError(line, "unknown key '" + key + "' in [" + section + "]");
    }
    if (!keys_seen.insert(key).second) {
      throw ConfigError(line, "duplicate key '" + key + "'");
    }
    try {
      it->second(line, value);
    } catch (const ConfigError & e) {
      if (e.line() > 0) {
        throw;
      }
      throw ConfigError(line, e.what());
    }
  }

  for (const auto & d : drafts) {
    for (const char * req : {"id", "d", "v", "headway"}) {
      if (d.seen.count(req) == 0) {
        throw ConfigError(d.line, std::string("[vehicle] is missing '") + req + "'");
      }
    }
    cfg.vehicles.push_back(d.spec);
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument & e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

SimConfig load_scenario(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(0, "cannot open scenario file '" + path + "'");
  }
  return parse_scenario(in);
}

void write_scenario(std::ostream & out, const SimConfig & cfg)
{
  auto f = format_number;
  out << "[sim]\n"
      << "duration = " << f(cfg.duration) << "\n"
      << "dt = " << f(cfg.dt) << "\n"
      << "decision_period = " << f(cfg.decision_period) << "\n"
      << "horizon = " << cfg.horizon << "\n"
      << "game_headway = " << f(cfg.game_headway) << "\n"
      << "mv_response_lag = " << f(cfg.mv_response_lag) << "\n"
      << "branch_reading = " << (cfg.branch_reading == BranchReading::Pseudocode ? "pseudocode" : "prose")
      << "\n\n[idm]\n"
      << "v0 = " << f(cfg.idm.v0) << "\n"
      << "a_max = " << f(cfg.idm.a_max) << "\n"
      << "b = " << f(cfg.idm.b) << "\n"
      << "s0 = " << f(cfg.idm.s0) << "\n"
      << "delta = " << f(cfg.idm.delta) << "\n\n[road]\n"
      << "s_merge = " << f(cfg.road.s_merge) << "\n"
      << "merge_area_start = " << f(cfg.road.merge_area_start) << "\n"
      << "convergence_end = " << f(cfg.road.convergence_end) << "\n\n[av]\n"
      << "id = " << cfg.av.id << "\n"
      << "lane = " << to_string(cfg.av.lane) << "\n"
      << "d = " << f(cfg.av.d) << "\n"
      << "v = " << f(cfg.av.v) << "\n"
      << "omega = " << f(cfg.av.omega) << "\n"
      << "length = " << f(cfg.av.length) << "\n"
      << "idm_headway = " << f(cfg.av.idm_headway) << "\n";
  for (const auto & v : cfg.vehicles) {
    out << "\n[vehicle]\n"
        << "id = " << v.id << "\n"
        << "lane = " << to_string(v.lane) << "\n"
        << "d = " << f(v.d) << "\n"
        << "v = " << f(v.v) << "\n"
        << "headway = " << format_headway(v.headway) << "\n"
        << "length = " << f(v.length) << "\n";
  }
}

void write_trace_csv(std::ostream & out, const SimTrace & trace)
{
  std::map<int, const DecisionRecord *> at_step;
  for (const auto & d : trace.decisions) {
    at_step[d.step] = &d;
  }
  out << "t,id,lane,s,v,a,decision,p_star,q_star,k_l,k_u,omega_hat\n";
  for (int k = 0; k < trace.n_steps; ++k) {
    const auto it = at_step.find(k);
    for (const auto & row : trace.step(k)) {
      out << format_number(row.t) << ',' << row.id << ',' << to_string(row.lane) << ',' << format_number(row.s)
          << ',' << format_number(row.v) << ',' << format_number(row.a);
      if (it != at_step.end() && row.id == trace.av_id) {
        const auto & d = *it->second;
        out << ',' << to_string(d.maneuver.kind);
        if (d.has_profile) {
          out << ',' << format_number(d.profile.p) << ',' << format_number(d.profile.q);
        } else {
          out << ",,";
        }
        if (!d.opponent.empty()) {
          out << ',' << format_number(d.belief.k_l) << ',' << format_number(d.belief.k_u) << ','
              << format_number(d.belief.omega_hat);
        } else {
          out << ",,,";
        }
      } else {
        out << ",,,,,,";
      }
      out << '\n';
    }
  }
}

void write_run_summary(std::ostream & out, const SimTrace & trace, const MetricsReport & m, Policy policy)
{
  out << "policy=" << to_string(policy) << "\n"
      << "steps=" << trace.n_steps << "\n"
      << "av_merged=" << (trace.av_merged ? 1 : 0) << "\n"
      << "merge_time=" << format_number(trace.merge_time) << "\n"
      << "av_leader=" << trace.av_leader() << "\n"
      << "av_follower=" << trace.av_follower() << "\n"
      << "requeues=" << trace.requeues << "\n"
      << "collisions=" << trace.collisions.size() << "\n";
  std::string order;
  for (const auto & id : trace.final_order) {
    order += (order.empty() ? "" : ";") + id;
  }
  out << "final_order=" << order << "\n";
  for (const auto & [id, h] : trace.headways) {
    out << "headway." << id << "=" << format_number(h) << "\n";
  }
  out << "mean_jerk=" << format_number(m.mean_jerk) << "\n"
      << "max_jerk=" << format_number(m.max_jerk) << "\n"
      << "terminal_speed=" << format_number(m.terminal_speed) << "\n"
      << "collided=" << (m.collided ? 1 : 0) << "\n"
      << "mean_ttc=" << format_number(m.mean_ttc) << "\n"
      << "ttc_samples=" << m.ttc_samples << "\n"
      << "ttc_undefined=" << (m.ttc_undefined ? 1 : 0) << "\n";
}

void write_batch_summary(std::ostream & out, const BatchSummary & s, Policy policy, std::uint64_t base_seed)
{
  auto stats = [&](const char * name, const MetricStats & m) {
    out << name << ".mean=" << format_number(m.mean) << "\n" << name << ".std=" << format_number(m.stddev) << "\n";
  };
  out << "policy=" << to_string(policy) << "\n"
      << "base_seed=" << base_seed << "\n"
      << "n_runs=" << s.n_runs << "\n"
      << "n_failed=" << s.n_failed << "\n";
  stats("mean_jerk", s.mean_jerk);
  stats("max_jerk", s.max_jerk);
  stats("terminal_speed", s.terminal_speed);
  stats("mean_ttc", s.mean_ttc);
  out << "collision_rate=" << format_number(s.collision_rate) << "\n"
      << "n_merged=" << s.n_merged << "\n";
  for (const auto & [id, n] : s.follower_counts) {
    out << "follower." << id << "=" << n << "\n";
  }
  for (const auto & r : s.runs) {
    out << "run." << r.seed << "=";
    if (r.ok) {
      out << "ok;merged=" << (r.av_merged ? 1 : 0) << ";leader=" << r.av_leader << ";follower=" << r.av_follower
          << ";mean_jerk=" << format_number(r.metrics.mean_jerk)
          << ";max_jerk=" << format_number(r.metrics.max_jerk)
          << ";terminal_speed=" << format_number(r.metrics.terminal_speed)
          << ";mean_ttc=" << format_number(r.metrics.mean_ttc) << ";collided=" << (r.metrics.collided ? 1 : 0);
    } else {
      out << "failed;error=" << r.error;
    }
    out << "\n";
  }
}

void write_probe_result(std::ostream & out, const ProbeResult & r, double true_omega)
{
  out << "true_omega=" << format_number(true_omega) << "\n";
  for (const auto & s : r.steps) {
    out << "interaction." << s.interaction << "=mv_dist=" << format_number(s.mv_dist)
        << ";q_star=" << (s.predicted_valid ? format_number(s.predicted.q) : std::string("none"))
        << ";accelerated=" << (s.reaction.accelerated ? 1 : 0) << ";updated=" << (s.updated ? 1 : 0)
        << ";k_l=" << format_number(s.belief.k_l) << ";k_u=" << format_number(s.belief.k_u)
        << ";omega_hat=" << format_number(s.belief.omega_hat) << "\n";
  }
  out << "bound_updates=" << r.bound_updates << "\n"
      << "updates_to_converge=" << r.updates_to_converge << "\n"
      << "containment_held=" << (r.containment_held ? 1 : 0) << "\n"
      << "omega_hat=" << format_number(r.final_belief.omega_hat) << "\n"
      << "k_l=" << format_number(r.final_belief.k_l) << "\n"
      << "k_u=" << format_number(r.final_belief.k_u) << "\n"
      << "inconsistent=" << (r.final_belief.inconsistent ? 1 : 0) << "\n";
}

}  // namespace merge_egt
