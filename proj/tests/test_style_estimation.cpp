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
#include <cmath>
#include <random>

#include "doctest.h"
#include "merge_egt/style_estimation.hpp"

using namespace merge_egt;

namespace
{

GameContext worked_ctx()
{
  GameContext c;
  c.av = {80.0, 10.0};
  c.mv = {100.0, 10.0};
  c.av_style = {0.5, 2.0};
  c.mv_style = {0.5, 2.0};
  c.headway_T = 2.0;
  return c;
}

// Dense outward scan at a fine step, no bisection.
std::pair<double, double> scan_oracle(const GameContext & c, const StrategyState & ess, double step)
{
  auto holds = [&](double w) {
    const auto e = select_ess(build_matrix(c.with_mv_omega(std::clamp(w, 1e-9, 1 - 1e-9))));
    return e && *e == ess;
  };
  double lo = c.mv_style.omega, hi = c.mv_style.omega;
  while (lo - step >= 0.0 && holds(lo - step)) {
    lo -= step;
  }
  if (lo - step < 0.0 && holds(0.0)) {
    lo = 0.0;
  }
  while (hi + step <= 1.0 && holds(hi + step)) {
    hi += step;
  }
  if (hi + step > 1.0 && holds(1.0)) {
    hi = 1.0;
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("observed reaction deadband")
{
  CHECK_FALSE(observed_reaction(10.0, 10.0).accelerated);
  CHECK(observed_reaction(10.5, 10.0).accelerated);
  CHECK_FALSE(observed_reaction(10.0005, 10.0).accelerated);
  CHECK_FALSE(observed_reaction(9.0, 10.0).accelerated);
}

TEST_CASE("stability interval on the worked context")
{
  const auto c = worked_ctx();
  const StrategyState ess{0.0, 1.0};
  const auto iv = ess_stability_interval(c, ess);
  CHECK_FALSE(iv.stale);
  CHECK(iv.lo < 0.5);
  CHECK(iv.hi > 0.5);
  const auto [lo, hi] = scan_oracle(c, ess, 1e-4);
  CHECK(std::abs(iv.lo - lo) <= 2e-4);
  CHECK(std::abs(iv.hi - hi) <= 2e-4);
  // Just past the upper edge the equilibrium is gone.
  CHECK(select_ess(build_matrix(c.with_mv_omega(iv.hi + 2e-4))) != ess);
}

TEST_CASE("omega-independent equilibrium spans the whole range")
{
  auto c = worked_ctx();
  c.mv = {40.0, 10.0};
  const auto e = select_ess(build_matrix(c));
  REQUIRE(e.has_value());
  const auto iv = ess_stability_interval(c, *e);
  CHECK(iv.lo == 0.0);
  CHECK(iv.hi == 1.0);
}

TEST_CASE("stale equilibrium")
{
  const auto c = worked_ctx();
  const auto iv = ess_stability_interval(c, {1.0, 1.0});
  CHECK(iv.stale);
  CHECK(iv.lo == 0.5);
  CHECK(iv.hi == 0.5);
  const StyleBelief b;
  const auto same = update_belief(b, {1.0, 1.0}, Reaction{true}, iv);
  CHECK(same.k_l == b.k_l);
  CHECK(same.k_u == b.k_u);
  CHECK_THROWS(ess_stability_interval(c, {0.0, 1.0}, 0.0));
}

TEST_CASE("bound updates from a given interval")
{
  const StyleBelief b;
  const StabilityInterval iv{0.38, 0.71, false};
  const auto up = update_belief(b, {0.0, 1.0}, Reaction{true}, iv);
  CHECK(up.k_l == doctest::Approx(0.71));
  CHECK(up.k_u == 1.0);
  CHECK(up.omega_hat == doctest::Approx(0.855));

  const auto same = update_belief(b, {0.0, 1.0}, Reaction{false}, iv);
  CHECK(same.k_l == 0.0);
  CHECK(same.k_u == 1.0);
  CHECK(same.omega_hat == 0.5);

  const auto down = update_belief(b, {1.0, 0.0}, Reaction{false}, iv);
  CHECK(down.k_l == 0.0);
  CHECK(down.k_u == doctest::Approx(0.38));
  CHECK(down.omega_hat == doctest::Approx(0.19));

  const auto confirm = update_belief(b, {1.0, 0.0}, Reaction{true}, iv);
  CHECK(confirm.omega_hat == 0.5);

  const auto prose = update_belief(b, {0.0, 1.0}, Reaction{true}, iv, BranchReading::Prose);
  CHECK(prose.k_u == doctest::Approx(0.38));
}

TEST_CASE("crossing bounds collapse and flag")
{
  StyleBelief b{0.6, 0.8, 0.7, false};
  const auto out = update_belief(b, {1.0, 0.0}, Reaction{false}, StabilityInterval{0.2, 0.9, false});
  CHECK(out.inconsistent);
  CHECK(out.k_l == 0.7);
  CHECK(out.k_u == 0.7);
  // Once inconsistent, nothing moves.
  const auto after = update_belief(out, {0.0, 1.0}, Reaction{true}, StabilityInterval{0.1, 0.95, false});
  CHECK(after.k_l == 0.7);
}

TEST_CASE("random update sequences never widen")
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int run = 0; run < 200; ++run) {
    StyleBelief b;
    for (int i = 0; i < 20; ++i) {
      double lo = u(rng), hi = u(rng);
      if (lo > hi) {
        std::swap(lo, hi);
      }
      const StrategyState ess{0.0, u(rng) < 0.5 ? 0.0 : 1.0};
      const auto next = update_belief(b, ess, Reaction{u(rng) < 0.5}, StabilityInterval{lo, hi, false});
      CHECK(next.width() <= b.width());
      if (!next.inconsistent) {
        CHECK(next.k_l >= b.k_l);
        CHECK(next.k_u <= b.k_u);
        CHECK(next.omega_hat == doctest::Approx(0.5 * (next.k_l + next.k_u)));
      }
      b = next;
    }
  }
}

TEST_CASE("context-driven update only on mispredictions")
{
  const auto c = worked_ctx();
  const StyleBelief b;
  const auto confirm = update_belief(b, {0.0, 1.0}, Reaction{false}, c);
  CHECK(confirm.omega_hat == 0.5);
  const auto miss = update_belief(b, {0.0, 1.0}, Reaction{true}, c);
  const auto iv = ess_stability_interval(c, {0.0, 1.0});
  CHECK(miss.k_l == iv.hi);
  CHECK(miss.k_u == 1.0);
}

TEST_CASE("truthful synthetic MV")
{
  const auto c = worked_ctx();
  // At omega 0.5 the MV yields; well above the edge it accelerates.
  CHECK_FALSE(truthful_reaction(c, 0.5, AvMove::Merge).accelerated);
  CHECK(truthful_reaction(c, 0.95, AvMove::Merge).accelerated);
}

TEST_CASE("probe bench converges with containment")
{
  for (int i = 1; i <= 9; ++i) {
    const double truth = 0.1 * i;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto r = run_probe_bench(truth, ProbeSetup{}, seed);
      CHECK(r.containment_held);
      CHECK(r.updates_to_converge >= 0);
      CHECK(r.updates_to_converge <= 10);
      CHECK(std::abs(r.final_belief.omega_hat - truth) <= 0.05);
      CHECK_FALSE(r.final_belief.inconsistent);
      for (std::size_t k = 1; k < r.steps.size(); ++k) {
        CHECK(r.steps[k].belief.width() <= r.steps[k - 1].belief.width());
      }
    }
  }
  CHECK_THROWS(run_probe_bench(1.0, ProbeSetup{}, 1));
}
