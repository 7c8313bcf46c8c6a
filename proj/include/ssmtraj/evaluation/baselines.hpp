// Copyright 2026 The ssmtraj Authors
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


#ifndef SSMTRAJ_EVALUATION_BASELINES_HPP_
#define SSMTRAJ_EVALUATION_BASELINES_HPP_

#include "ssmtraj/dynamics/model.hpp"
#include "ssmtraj/evaluation/metrics.hpp"

namespace ssmtraj::evaluation
{

/// p_k = p_0 + k dt v_0 for k = 1..horizon.
Path cv_predict(const dynamics::AgentState & last, std::size_t horizon, double dt);

/// p_k = p_0 + k dt v_0 + (k dt)^2 a_0 / 2 for k = 1..horizon.
Path ca_predict(const dynamics::AgentState & last, const Point & accel, std::size_t horizon, double dt);

/// (v_last - v_prev) / dt.
Point estimate_acceleration(const dynamics::AgentState & prev, const dynamics::AgentState & last, double dt);

}  // namespace ssmtraj::evaluation

#endif  // SSMTRAJ_EVALUATION_BASELINES_HPP_
