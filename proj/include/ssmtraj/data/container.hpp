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


#ifndef SSMTRAJ_DATA_CONTAINER_HPP_
#define SSMTRAJ_DATA_CONTAINER_HPP_

#include "ssmtraj/data/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ssmtraj::data
{

// Layout (little-endian): "SSMG", u32 version, u64 count, then per sample
//   i64 scene_id, i64 start_frame, f64 dt, f64 radius,
//   u64 n, i64 id * n, u64 T_obs, u64 t_f,
//   f64 * 4 * n * (T_obs + t_f) states, observed frames first.
// Graphs are rebuilt from the observed states on load.
inline constexpr char kContainerMagic[4] = {'S', 'S', 'M', 'G'};
inline constexpr std::uint32_t kContainerVersion = 1;

std::vector<std::uint8_t> encode_processed(const std::vector<GraphSequence> & samples);
/// Throws FormatError on a bad magic, an unknown version or truncation.
std::vector<GraphSequence> decode_processed(const std::vector<std::uint8_t> & bytes);

void save_processed(const std::filesystem::path & path, const std::vector<GraphSequence> & samples);
std::vector<GraphSequence> load_processed(const std::filesystem::path & path);

}  // namespace ssmtraj::data

#endif  // SSMTRAJ_DATA_CONTAINER_HPP_
