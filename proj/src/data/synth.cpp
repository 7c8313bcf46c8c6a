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


#include "ssmtraj/data/synth.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/rng.hpp"

#include <cmath>
#include <numbers>

namespace ssmtraj::data
{

SynthKind parse_synth_kind(const std::string & name)
{
  if (name == "highway") {
    return SynthKind::Highway;
  }
  if (name == "roundabout") {
    return SynthKind::Roundabout;
  }
  throw ContractViolation("unknown synthetic scene kind '" + name + "' (expected highway or roundabout)");
}

namespace
{

Scene highway(const SynthOptions & o, std::int64_t id, numcore::Rng & rng)
{
  Scene s;
  s.scene_id = id;
  s.frame_rate = o.frame_rate;
  for (std::size_t a = 0; a < o.agents; ++a) {
    const double y = kLaneWidth * static_cast<double>(a % 3);
    const double x0 = 15.0 * static_cast<double>(a) + rng.uniform(0.0, 5.0);
    const double v = o.speed > 0.0 ? o.speed : rng.uniform(20.0, 35.0);
    const double acc = o.max_accel > 0.0 ? rng.uniform(-o.max_accel, o.max_accel) : 0.0;
    Track t;
    t.id = static_cast<std::int64_t>(a) + 1;
    for (std::size_t f = 0; f < o.frames; ++f) {
      const double time = static_cast<double>(f) / o.frame_rate;
      t.points.push_back(
        {static_cast<std::int64_t>(f), {x0 + v * time + 0.5 * acc * time * time, y, v + acc * time, 0.0}});
    }
    s.tracks.push_back(std::move(t));
  }
  return s;
}

Scene roundabout(const SynthOptions & o, std::int64_t id, numcore::Rng & rng)
{
  Scene s;
  s.scene_id = id;
  s.frame_rate = o.frame_rate;
  for (std::size_t a = 0; a < o.agents; ++a) {
    const double r = o.radius > 0.0 ? o.radius : rng.uniform(15.0, 35.0);
    const double v = o.speed > 0.0 ? o.speed : rng.uniform(5.0, 12.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double omega = v / r;
    Track t;
    t.id = static_cast<std::int64_t>(a) + 1;
    for (std::size_t f = 0; f < o.frames; ++f) {
      const double theta = phase + omega * static_cast<double>(f) / o.frame_rate;
      t.points.push_back(
        {static_cast<std::int64_t>(f),
         {r * std::cos(theta), r * std::sin(theta), -v * std::sin(theta), v * std::cos(theta)}});
    }
    s.tracks.push_back(std::move(t));
  }
  return s;
}

}  // namespace

std::vector<Scene> synth_generate(const SynthOptions & o)
{
  require(o.agents >= 1, "synth: at least one agent per scene");
  require(o.frames >= 1 && o.frame_rate > 0.0, "synth: frames and frame rate must be positive");
  require(o.noise_std >= 0.0, "synth: noise must be non-negative");
  const numcore::Rng root(o.seed);
  std::vector<Scene> out;
  out.reserve(o.scenes);
  for (std::size_t i = 0; i < o.scenes; ++i) {
    numcore::Rng rng = root.fork(i);
    const auto id = static_cast<std::int64_t>(i);
    Scene s = o.kind == SynthKind::Highway ? highway(o, id, rng) : roundabout(o, id, rng);
    if (o.noise_std > 0.0) {
      for (auto & t : s.tracks) {
        for (auto & p : t.points) {
          p.state.x += rng.normal(0.0, o.noise_std);
          p.state.y += rng.normal(0.0, o.noise_std);
          p.state.vx += rng.normal(0.0, o.noise_std);
          p.state.vy += rng.normal(0.0, o.noise_std);
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ssmtraj::data
