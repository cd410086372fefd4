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

#include "merge_egt/egt_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace merge_egt
{

namespace
{

bool is_unit(double x) { return x == 0.0 || x == 1.0; }

StrategyState clamp_unit(StrategyState s)
{
  return {std::clamp(s.p, 0.0, 1.0), std::clamp(s.q, 0.0, 1.0)};
}

// Nash product of deviation losses at a stable corner.
double deviation_loss_product(const Eigenvalues & e) { return e.lambda1 * e.lambda2; }

}  // namespace

bool PayoffMatrix::is_finite() const
{
  for (double x : {u11, u12, u21, u22, v11, v12, v21, v22}) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

bool StrategyState::is_pure() const { return is_unit(p) && is_unit(q); }

std::vector<StrategyState> EquilibriumReport::stable_points() const
{
  std::vector<StrategyState> out;
  for (const auto & fp : fixed_points) {
    if (fp.stable) {
      out.push_back(fp.point);
    }
  }
  return out;
}

const FixedPoint * EquilibriumReport::find(const StrategyState & point) const
{
  for (const auto & fp : fixed_points) {
    if (fp.point == point) {
      return &fp;
    }
  }
  return nullptr;
}

ExpectedPayoffs expected_payoffs(const PayoffMatrix & m, const StrategyState & s)
{
  ExpectedPayoffs e;
  e.av_yield = s.q * m.u11 + (1.0 - s.q) * m.u12;
  e.av_merge = s.q * m.u21 + (1.0 - s.q) * m.u22;
  e.mv_yield = s.p * m.v11 + (1.0 - s.p) * m.v21;
  e.mv_accelerate = s.p * m.v12 + (1.0 - s.p) * m.v22;
  e.av_mean = s.p * e.av_yield + (1.0 - s.p) * e.av_merge;
  e.mv_mean = s.q * e.mv_yield + (1.0 - s.q) * e.mv_accelerate;
  return e;
}

ReplicatorRate replicator_rhs(const PayoffMatrix & m, const StrategyState & s)
{
  const auto e = expected_payoffs(m, s);
  return {
    s.p * (1.0 - s.p) * (e.av_yield - e.av_merge),
    s.q * (1.0 - s.q) * (e.mv_yield - e.mv_accelerate)};
}

Eigenvalues eigenvalues_at(const PayoffMatrix & m, const StrategyState & point)
{
  if (!point.is_pure()) {
    throw std::invalid_argument("eigenvalues_at: point is not a pure strategy pair");
  }
  // Off-diagonal Jacobian terms carry p(1-p) or q(1-q) and vanish at corners.
  const auto e = expected_payoffs(m, point);
  return {
    (1.0 - 2.0 * point.p) * (e.av_yield - e.av_merge),
    (1.0 - 2.0 * point.q) * (e.mv_yield - e.mv_accelerate)};
}

std::optional<StrategyState> interior_fixed_point(const PayoffMatrix & m)
{
  // E_AV1 = E_AV2 fixes q, E_MV1 = E_MV2 fixes p.
  const double av_at_q1 = m.u11 - m.u21;
  const double av_at_q0 = m.u12 - m.u22;
  const double mv_at_p1 = m.v11 - m.v12;
  const double mv_at_p0 = m.v21 - m.v22;
  const double q_den = av_at_q1 - av_at_q0;
  const double p_den = mv_at_p1 - mv_at_p0;
  if (q_den == 0.0 || p_den == 0.0) {
    return std::nullopt;
  }
  const double q = -av_at_q0 / q_den;
  const double p = -mv_at_p0 / p_den;
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    return std::nullopt;
  }
  return StrategyState{p, q};
}

EquilibriumReport solve_ess(const PayoffMatrix & m)
{
  if (!m.is_finite()) {
    throw std::invalid_argument("solve_ess: payoff matrix has non-finite entries");
  }
  EquilibriumReport report;
  report.fixed_points.reserve(5);

  const FixedPoint * best = nullptr;
  double best_product = 0.0;
  bool tie = false;
  int n_stable = 0;

  for (const auto & corner : kPurePoints) {
    FixedPoint fp;
    fp.point = corner;
    fp.pure = true;
    fp.eigenvalues = eigenvalues_at(m, corner);
    fp.stable = fp.eigenvalues.lambda1 < -kZeroEigenvalue && fp.eigenvalues.lambda2 < -kZeroEigenvalue;
    report.fixed_points.push_back(fp);
  }
  for (const auto & fp : report.fixed_points) {
    if (!fp.stable) {
      continue;
    }
    ++n_stable;
    const double product = deviation_loss_product(fp.eigenvalues);
    if (best == nullptr || product > best_product) {
      best = &fp;
      best_product = product;
      tie = false;
    } else if (product == best_product) {
      tie = true;
    }
  }
  report.multiple_stable = n_stable > 1;
  if (best != nullptr && !tie) {
    report.ess = best->point;
  }

  // Zero-trace Jacobian at an interior rest point: never asymptotically stable.
  if (auto interior = interior_fixed_point(m)) {
    FixedPoint fp;
    fp.point = *interior;
    fp.pure = false;
    fp.stable = false;
    report.fixed_points.push_back(fp);
  }
  return report;
}

std::optional<StrategyState> select_ess(const PayoffMatrix & m) { return solve_ess(m).ess; }

std::vector<StrategyState> integrate_replicator(
  const PayoffMatrix & m, const StrategyState & s0, double dt, int steps)
{
  if (!(dt > 0.0) || steps < 1) {
    throw std::invalid_argument("integrate_replicator: dt must be > 0 and steps >= 1");
  }
  if (!s0.is_valid()) {
    throw std::invalid_argument("integrate_replicator: initial state outside [0,1]^2");
  }
  std::vector<StrategyState> traj;
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  traj.push_back(s0);

  auto shifted = [](const StrategyState & s, const ReplicatorRate & k, double h) {
    return StrategyState{s.p + h * k.dp, s.q + h * k.dq};
  };

  StrategyState s = s0;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = replicator_rhs(m, s);
    const auto k2 = replicator_rhs(m, shifted(s, k1, 0.5 * dt));
    const auto k3 = replicator_rhs(m, shifted(s, k2, 0.5 * dt));
    const auto k4 = replicator_rhs(m, shifted(s, k3, dt));
    s.p += dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    s.q += dt / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    s = clamp_unit(s);
    traj.push_back(s);
  }
  return traj;
}

}  // namespace merge_egt
