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

#ifndef MERGE_EGT__EGT_CORE_HPP_
#define MERGE_EGT__EGT_CORE_HPP_

#include <optional>
#include <vector>

namespace merge_egt
{

/// Asymmetric 2x2 bimatrix stored as fitness (higher is better).
///
/// Row 1 is AV Yield, row 2 is AV Merge. Column 1 is MV Yield, column 2 is
/// MV Accelerate. `u` belongs to the AV, `v` to the MV.
struct PayoffMatrix
{
  double u11{0.0};
  double u12{0.0};
  double u21{0.0};
  double u22{0.0};
  double v11{0.0};
  double v12{0.0};
  double v21{0.0};
  double v22{0.0};

  bool is_finite() const;
};

/// Mixed strategy pair: p = P(AV yields), q = P(MV yields).
struct StrategyState
{
  double p{0.0};
  double q{0.0};

  bool is_valid() const { return p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0; }
  bool is_pure() const;
  friend bool operator==(const StrategyState &, const StrategyState &) = default;
};

struct ExpectedPayoffs
{
  double av_yield{0.0};       // E_AV1
  double av_merge{0.0};       // E_AV2
  double mv_yield{0.0};       // E_MV1
  double mv_accelerate{0.0};  // E_MV2
  double av_mean{0.0};        // E_AV
  double mv_mean{0.0};        // E_MV
};

struct ReplicatorRate
{
  double dp{0.0};
  double dq{0.0};
};

struct Eigenvalues
{
  double lambda1{0.0};  // dF(p)/dp
  double lambda2{0.0};  // dF(q)/dq
};

struct FixedPoint
{
  StrategyState point;
  bool pure{true};
  // Only meaningful for pure points; the interior point keeps zeros.
  Eigenvalues eigenvalues;
  bool stable{false};
};

/// Result of the fixed-point enumeration. `ess` holds the selected stable
/// pure point; when several pure points are stable the selection is by risk
/// dominance (largest product of deviation losses) and `multiple_stable` is
/// set. An exact tie leaves `ess` empty.
struct EquilibriumReport
{
  std::vector<FixedPoint> fixed_points;
  std::optional<StrategyState> ess;
  bool multiple_stable{false};

  std::vector<StrategyState> stable_points() const;
  const FixedPoint * find(const StrategyState & point) const;
};

/// Eigenvalues inside this band count as zero, never as stable.
inline constexpr double kZeroEigenvalue = 1e-9;

/// Oracle integrator defaults.
inline constexpr double kOracleStep = 0.01;
inline constexpr double kOracleHorizon = 50.0;

inline constexpr StrategyState kPurePoints[4] = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};

ExpectedPayoffs expected_payoffs(const PayoffMatrix & m, const StrategyState & s);

/// F(p) = p(1-p)(E_AV1 - E_AV2), F(q) = q(1-q)(E_MV1 - E_MV2).
ReplicatorRate replicator_rhs(const PayoffMatrix & m, const StrategyState & s);

/// Jacobian diagonal at a pure point. Throws std::invalid_argument for
/// anything that is not one of the four corners.
Eigenvalues eigenvalues_at(const PayoffMatrix & m, const StrategyState & point);

/// Interior rest point, if both indifference equations have a solution in (0,1)^2.
std::optional<StrategyState> interior_fixed_point(const PayoffMatrix & m);

EquilibriumReport solve_ess(const PayoffMatrix & m);

/// Convenience: the selected ESS of `solve_ess`.
std::optional<StrategyState> select_ess(const PayoffMatrix & m);

/// Fixed-step RK4 integration of the replicator field, clamped to [0,1]^2.
/// Returns steps + 1 states including `s0`.
std::vector<StrategyState> integrate_replicator(
  const PayoffMatrix & m, const StrategyState & s0, double dt, int steps);

}  // namespace merge_egt

#endif  // MERGE_EGT__EGT_CORE_HPP_
