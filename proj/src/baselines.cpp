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

#include "merge_egt/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace merge_egt
{

namespace
{

// p = 1 is row 1 (Yield), q = 1 is column 1 (Yield).
double av_payoff(const PayoffMatrix & m, int p, int q)
{
  if (p == 1) {
    return q == 1 ? m.u11 : m.u12;
  }
  return q == 1 ? m.u21 : m.u22;
}

double mv_payoff(const PayoffMatrix & m, int p, int q)
{
  if (p == 1) {
    return q == 1 ? m.v11 : m.v12;
  }
  return q == 1 ? m.v21 : m.v22;
}

bool is_pure_nash(const PayoffMatrix & m, int p, int q)
{
  return av_payoff(m, p, q) >= av_payoff(m, 1 - p, q) && mv_payoff(m, p, q) >= mv_payoff(m, p, 1 - q);
}

// Follower reply, ties to Yield.
int mv_best_response(const PayoffMatrix & m, int p)
{
  return mv_payoff(m, p, 1) >= mv_payoff(m, p, 0) ? 1 : 0;
}

}  // namespace

const char * to_string(Policy policy)
{
  switch (policy) {
    case Policy::Egt:
      return "egt";
    case Policy::NashPure:
      return "nash";
    case Policy::StackelbergAvLeader:
      return "stackelberg";
  }
  return "egt";
}

Policy parse_policy(const std::string & name)
{
  if (name == "egt") {
    return Policy::Egt;
  }
  if (name == "nash") {
    return Policy::NashPure;
  }
  if (name == "stackelberg") {
    return Policy::StackelbergAvLeader;
  }
  throw std::invalid_argument("unknown policy '" + name + "' (expected egt|nash|stackelberg)");
}

std::vector<StrategyState> nash_pure(const PayoffMatrix & m)
{
  struct Profile
  {
    int p;
    int q;
  };
  std::vector<Profile> eq;
  // Lexicographic (p, q) enumeration order doubles as the final tie-break.
  for (int p = 0; p <= 1; ++p) {
    for (int q = 0; q <= 1; ++q) {
      if (is_pure_nash(m, p, q)) {
        eq.push_back({p, q});
      }
    }
  }

  auto dominates = [&](const Profile & a, const Profile & b) {
    const double ua = av_payoff(m, a.p, a.q), ub = av_payoff(m, b.p, b.q);
    const double va = mv_payoff(m, a.p, a.q), vb = mv_payoff(m, b.p, b.q);
    return ua >= ub && va >= vb && (ua > ub || va > vb);
  };
  auto welfare = [&](const Profile & a) { return av_payoff(m, a.p, a.q) + mv_payoff(m, a.p, a.q); };

  std::size_t best = 0;
  bool pareto_found = false;
  for (std::size_t i = 0; i < eq.size() && !pareto_found; ++i) {
    bool dominant = true;
    for (std::size_t j = 0; j < eq.size(); ++j) {
      if (j != i && !dominates(eq[i], eq[j])) {
        dominant = false;
        break;
      }
    }
    if (dominant && eq.size() > 1) {
      best = i;
      pareto_found = true;
    }
  }
  if (!pareto_found) {
    for (std::size_t i = 1; i < eq.size(); ++i) {
      if (welfare(eq[i]) > welfare(eq[best])) {
        best = i;
      }
    }
  }
  if (!eq.empty()) {
    std::rotate(eq.begin(), eq.begin() + static_cast<std::ptrdiff_t>(best), eq.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }

  std::vector<StrategyState> out;
  out.reserve(eq.size());
  for (const auto & e : eq) {
    out.push_back({static_cast<double>(e.p), static_cast<double>(e.q)});
  }
  return out;
}

StrategyState stackelberg(const PayoffMatrix & m)
{
  const int reply_if_yield = mv_best_response(m, 1);
  const int reply_if_merge = mv_best_response(m, 0);
  const double yield_value = av_payoff(m, 1, reply_if_yield);
  const double merge_value = av_payoff(m, 0, reply_if_merge);
  // Leader ties go to Yield as well.
  if (yield_value >= merge_value) {
    return {1.0, static_cast<double>(reply_if_yield)};
  }
  return {0.0, static_cast<double>(reply_if_merge)};
}

std::optional<StrategyState> equilibrium_profile(const PayoffMatrix & m, Policy policy)
{
  switch (policy) {
    case Policy::Egt:
      return select_ess(m);
    case Policy::NashPure: {
      auto eq = nash_pure(m);
      if (eq.empty()) {
        return std::nullopt;
      }
      return eq.front();
    }
    case Policy::StackelbergAvLeader:
      return stackelberg(m);
  }
  return std::nullopt;
}

}  // namespace merge_egt
