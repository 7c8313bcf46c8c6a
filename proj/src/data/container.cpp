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


#include "ssmtraj/data/container.hpp"

#include "ssmtraj/numcore/checkpoint.hpp"
#include "ssmtraj/numcore/errors.hpp"

namespace ssmtraj::data
{

namespace wire = numcore::wire;

namespace
{

void put_frames(std::vector<std::uint8_t> & out, const std::vector<std::vector<AgentState>> & frames)
{
  for (const auto & f : frames) {
    for (const auto & s : f) {
      for (double v : s.as_array()) {
        wire::put_f64(out, v);
      }
    }
  }
}

std::vector<std::vector<AgentState>> get_frames(wire::Reader & r, std::size_t steps, std::size_t n)
{
  std::vector<std::vector<AgentState>> frames(steps, std::vector<AgentState>(n));
  for (auto & f : frames) {
    for (auto & s : f) {
      s.x = r.f64();
      s.y = r.f64();
      s.vx = r.f64();
      s.vy = r.f64();
    }
  }
  return frames;
}

}  // namespace

std::vector<std::uint8_t> encode_processed(const std::vector<GraphSequence> & samples)
{
  std::vector<std::uint8_t> out(kContainerMagic, kContainerMagic + 4);
  wire::put_u32(out, kContainerVersion);
  wire::put_u64(out, samples.size());
  for (const auto & s : samples) {
    wire::put_i64(out, s.scene_id);
    wire::put_i64(out, s.start_frame);
    wire::put_f64(out, s.dt);
    wire::put_f64(out, s.radius);
    wire::put_u64(out, s.agent_ids.size());
    for (auto id : s.agent_ids) {
      wire::put_i64(out, id);
    }
    wire::put_u64(out, s.observed.size());
    wire::put_u64(out, s.future.size());
    put_frames(out, s.observed);
    put_frames(out, s.future);
  }
  return out;
}

std::vector<GraphSequence> decode_processed(const std::vector<std::uint8_t> & bytes)
{
  wire::Reader r(bytes);
  if (r.bytes(4) != std::string(kContainerMagic, 4)) {
    throw FormatError("not a processed-data container (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kContainerVersion) {
    throw FormatError(
      "incompatible processed-data version " + std::to_string(version) + " (this build reads " +
      std::to_string(kContainerVersion) + ")");
  }
  const std::uint64_t count = r.u64();
  std::vector<GraphSequence> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    GraphSequence s;
    s.scene_id = r.i64();
    s.start_frame = r.i64();
    s.dt = r.f64();
    s.radius = r.f64();
    const std::uint64_t n = r.u64();
    // each agent costs at least 8 bytes, which bounds a corrupt count
    if (n > bytes.size()) {
      throw FormatError("processed-data container is corrupt (agent count)");
    }
    for (std::uint64_t a = 0; a < n; ++a) {
      s.agent_ids.push_back(r.i64());
    }
    const std::uint64_t t_obs = r.u64();
    const std::uint64_t t_f = r.u64();
    if (t_obs > bytes.size() || t_f > bytes.size()) {
      throw FormatError("processed-data container is corrupt (frame count)");
    }
    s.observed = get_frames(r, t_obs, n);
    s.future = get_frames(r, t_f, n);
    build_graphs(s);
    out.push_back(std::move(s));
  }
  if (!r.at_end()) {
    throw FormatError("processed-data container has trailing bytes");
  }
  return out;
}

void save_processed(const std::filesystem::path & path, const std::vector<GraphSequence> & samples)
{
  wire::write_file(path, encode_processed(samples));
}

std::vector<GraphSequence> load_processed(const std::filesystem::path & path)
{
  return decode_processed(wire::read_file(path));
}

}  // namespace ssmtraj::data
