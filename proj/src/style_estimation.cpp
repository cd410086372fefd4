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

#include "merge_egt/style_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

namespace merge_egt
{

namespace
{

// Keeps scan points inside the open style domain.
constexpr double kOmegaEdge = 1e-9;

std::optional<StrategyState> profile_at(const GameContext & ctx, double omega, Policy policy)
{
  const double w = std::clamp(omega, kOmegaEdge, 1.0 - kOmegaEdge);
  return equilibrium_profile(build_matrix(ctx.with_mv_omega(w)), policy);
}

bool holds_at(const GameContext & ctx, double omega, const StrategyState & ess, Policy policy)
{
  const auto e = profile_at(ctx, omega, policy);
  return e.has_value() && *e == ess;
}

// `inside` holds the equilibrium, `outside` does not. Returns the inside end.
double refine_edge(
  const GameContext & ctx, const StrategyState & ess, Policy policy, double inside, double outside)
{
  while (std::abs(outside - inside) > kBoundaryTolerance) {
    const double mid = 0.5 * (inside + outside);
    if (holds_at(ctx, mid, ess, policy)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace

StabilityInterval ess_stability_interval(
  const GameContext & ctx, const StrategyState & ess, double grid_step, Policy policy)
{
  if (!(grid_step > 0.0) || grid_step > 1.0) {
    throw std::invalid_argument("ess_stability_interval: grid_step must lie in (0, 1]");
  }
  const double center = ctx.mv_style.omega;
  if (!holds_at(ctx, center, ess, policy)) {
    return {center, center, true};
  }

  StabilityInterval out;
  out.lo = 0.0;
  for (double prev = center;;) {
    const double w = std::max(0.0, prev - grid_step);
    if (!holds_at(ctx, w, ess, policy)) {
      out.lo = refine_edge(ctx, ess, policy, prev, w);
      break;
    }
    if (w <= 0.0) {
      break;
    }
    prev = w;
  }
  out.hi = 1.0;
  for (double prev = center;;) {
    const double w = std::min(1.0, prev + grid_step);
    if (!holds_at(ctx, w, ess, policy)) {
      out.hi = refine_edge(ctx, ess, policy, prev, w);
      break;
    }
    if (w >= 1.0) {
      break;
    }
    prev = w;
  }
  return out;
}

Reaction observed_reaction(double v_now, double v_prev) { return {v_now > v_prev + kSpeedDeadband}; }

StyleBelief update_belief(
  const StyleBelief & b, const StrategyState & ess, const Reaction & r, const StabilityInterval & interval,
  BranchReading reading)
{
  if (b.inconsistent || interval.stale) {
    return b;
  }
  const bool predicted_accelerate = ess.q == 0.0;
  const bool predicted_yield = ess.q == 1.0;

  StyleBelief next = b;
  if (predicted_accelerate && !r.accelerated) {
    if (reading == BranchReading::Pseudocode) {
      next.k_u = std::min(b.k_u, interval.lo);
    } else {
      next.k_l = std::max(b.k_l, interval.hi);
    }
  } else if (predicted_yield && r.accelerated) {
    if (reading == BranchReading::Pseudocode) {
      next.k_l = std::max(b.k_l, interval.hi);
    } else {
      next.k_u = std::min(b.k_u, interval.lo);
    }
  } else {
    return b;
  }

  if (next.k_l >= next.k_u) {
    next.k_l = b.omega_hat;
    next.k_u = b.omega_hat;
    next.omega_hat = b.omega_hat;
    next.inconsistent = true;
    return next;
  }
  next.omega_hat = 0.5 * (next.k_l + next.k_u);
  return next;
}

StyleBelief update_belief(
  const StyleBelief & b, const StrategyState & ess, const Reaction & r, const GameContext & ctx,
  BranchReading reading, Policy policy)
{
  const bool mispredicted = (ess.q == 0.0 && !r.accelerated) || (ess.q == 1.0 && r.accelerated);
  if (!mispredicted || b.inconsistent) {
    return b;
  }
  const auto interval = ess_stability_interval(ctx.with_mv_omega(b.omega_hat), ess, kDefaultGridStep, policy);
  return update_belief(b, ess, r, interval, reading);
}

Reaction truthful_reaction(const GameContext & ctx, double true_omega, AvMove av_move)
{
  const auto m = build_matrix(ctx.with_mv_omega(true_omega));
  if (const auto e = select_ess(m)) {
    return {e->q == 0.0};
  }
  const bool yields = av_move == AvMove::Yield ? m.v11 >= m.v12 : m.v21 >= m.v22;
  return {!yields};
}

ProbeResult run_probe_bench(double true_omega, const ProbeSetup & setup, std::uint64_t seed)
{
  if (!(true_omega > 0.0 && true_omega < 1.0)) {
    throw std::invalid_argument("run_probe_bench: true omega must lie in (0,1)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.5, 1.0);

  GameContext base;
  base.av = setup.av;
  base.mv = {setup.mv_dist_min, setup.mv_speed};
  base.av_style = setup.av_style;
  base.mv_style = {0.5, setup.av_style.headway};
  base.headway_T = setup.headway_T;

  auto yields_at = [&](double dist, double omega) {
    GameContext c = base;
    c.mv.dist_to_merge = dist;
    const auto e = profile_at(c, omega, Policy::Egt);
    return e.has_value() && e->q == 1.0;
  };

  ProbeResult result;
  StyleBelief belief;
  bool converged = false;

  for (int i = 0; i < setup.max_interactions; ++i) {
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    const double threshold =
      std::clamp(belief.omega_hat + sign * setup.probe_offset * jitter(rng), 1e-3, 1.0 - 1e-3);

    // Yielding becomes attractive as the MV sits further back; find the
    // distance where the flip happens at `threshold`.
    double near = setup.mv_dist_min;
    double far = setup.mv_dist_max;
    double dist = far;
    if (!yields_at(near, threshold) && yields_at(far, threshold)) {
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (near + far);
        (yields_at(mid, threshold) ? far : near) = mid;
      }
      dist = far;
    } else if (yields_at(near, threshold)) {
      dist = near;
    }

    GameContext ctx = base.with_mv_omega(belief.omega_hat);
    ctx.mv.dist_to_merge = dist;

    ProbeStep step;
    step.interaction = i;
    step.mv_dist = dist;
    const auto predicted = select_ess(build_matrix(ctx));
    const AvMove av_move = predicted && predicted->p == 1.0 ? AvMove::Yield : AvMove::Merge;
    step.reaction = truthful_reaction(ctx, true_omega, av_move);
    if (predicted) {
      step.predicted = *predicted;
      step.predicted_valid = true;
      const auto next = update_belief(belief, *predicted, step.reaction, ctx);
      step.updated = next.k_l != belief.k_l || next.k_u != belief.k_u;
      belief = next;
    }
    step.belief = belief;
    if (true_omega < belief.k_l || true_omega > belief.k_u) {
      result.containment_held = false;
    }
    if (step.updated) {
      ++result.bound_updates;
    }
    const bool close = std::abs(belief.omega_hat - true_omega) <= 0.05;
    if (close && !converged) {
      result.updates_to_converge = result.bound_updates;
    } else if (!close) {
      result.updates_to_converge = -1;
    }
    converged = close;
    result.steps.push_back(step);
  }
  result.final_belief = belief;
  return result;
}

}  // namespace merge_egt
