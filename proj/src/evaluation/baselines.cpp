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


#include "ssmtraj/evaluation/baselines.hpp"

#include "ssmtraj/numcore/errors.hpp"

namespace ssmtraj::evaluation
{

Path cv_predict(const dynamics::AgentState & last, std::size_t horizon, double dt)
{
  return ca_predict(last, {0.0, 0.0}, horizon, dt);
}

Path ca_predict(const dynamics::AgentState & last, const Point & accel, std::size_t horizon, double dt)
{
  require(horizon >= 1, "baseline horizon must be at least 1");
  require(dt > 0.0, "baseline step must be positive");
  Path out(horizon);
  for (std::size_t k = 1; k <= horizon; ++k) {
    const double t = static_cast<double>(k) * dt;
    out[k - 1] = {last.x + t * last.vx + 0.5 * t * t * accel.x, last.y + t * last.vy + 0.5 * t * t * accel.y};
  }
  return out;
}

Point estimate_acceleration(const dynamics::AgentState & prev, const dynamics::AgentState & last, double dt)
{
  require(dt > 0.0, "acceleration estimate needs a positive step");
  return {(last.vx - prev.vx) / dt, (last.vy - prev.vy) / dt};
}

}  // namespace ssmtraj::evaluation
