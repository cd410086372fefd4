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

#ifndef MERGE_EGT__BASELINES_HPP_
#define MERGE_EGT__BASELINES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "merge_egt/egt_core.hpp"

namespace merge_egt
{

/// Equilibrium policy used by the runner. Baselines share the payoff model.
enum class Policy { Egt, NashPure, StackelbergAvLeader };

const char * to_string(Policy policy);
/// Accepts "egt", "nash", "stackelberg". Throws std::invalid_argument.
Policy parse_policy(const std::string & name);

/// Pure Nash equilibria, best candidate first: Pareto-dominant profile if
/// one exists, otherwise largest u + v, otherwise lexicographic (p, q).
std::vector<StrategyState> nash_pure(const PayoffMatrix & m);

/// AV leads; MV best-responds with ties broken toward Yield.
StrategyState stackelberg(const PayoffMatrix & m);

/// The profile each policy would act on, or nullopt when it has none.
std::optional<StrategyState> equilibrium_profile(const PayoffMatrix & m, Policy policy);

}  // namespace merge_egt

#endif  // MERGE_EGT__BASELINES_HPP_
