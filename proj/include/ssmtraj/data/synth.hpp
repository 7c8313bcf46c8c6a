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


#ifndef SSMTRAJ_DATA_SYNTH_HPP_
#define SSMTRAJ_DATA_SYNTH_HPP_

#include "ssmtraj/data/scene.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ssmtraj::data
{

enum class SynthKind
{
  Highway,
  Roundabout,
};

SynthKind parse_synth_kind(const std::string & name);

struct SynthOptions
{
  SynthKind kind{SynthKind::Highway};
  std::size_t scenes{100};
  std::size_t agents{4};
  /// std of the additive noise on positions (m) and velocities (m/s)
  double noise_std{0.0};
  std::uint64_t seed{0};
  std::size_t frames{200};
  double frame_rate{25.0};
  /// highway: longitudinal accelerations are drawn from U[-a, a]; 0 keeps speeds constant
  double max_accel{0.0};
  /// > 0 fixes the speed; otherwise U[20, 35] on highways and U[5, 12] on roundabouts
  double speed{0.0};
  /// roundabout radius; > 0 fixes it, otherwise U[15, 35]
  double radius{0.0};
};

inline constexpr double kLaneWidth = 3.75;

/**
 * Desk-scale stand-ins for recorded traffic. Highway agents drive along +x
 * in three lanes; roundabout agents circle the origin counter-clockwise at
 * angular rate speed / radius. Each scene draws from its own stream, so a
 * scene does not depend on how many scenes come before it.
 */
std::vector<Scene> synth_generate(const SynthOptions & options);

}  // namespace ssmtraj::data

#endif  // SSMTRAJ_DATA_SYNTH_HPP_
