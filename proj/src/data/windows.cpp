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


#include "ssmtraj/data/windows.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/parallel.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace ssmtraj::data
{

std::vector<GraphSequence> make_windows(const Scene & scene, const WindowOptions & o)
{
  require(o.observed >= 2, "make_windows: at least two observed frames");
  require(o.horizon >= 1, "make_windows: at least one future frame");
  require(o.stride >= 1 && o.downsample >= 1, "make_windows: stride and downsample must be positive");
  const double dt = static_cast<double>(o.downsample) / scene.frame_rate;
  require(
    static_cast<double>(o.observed * o.downsample) <= kMaxObservationSeconds * scene.frame_rate + 1e-9,
    "make_windows: observation window longer than 3 s");

  std::int64_t first = std::numeric_limits<std::int64_t>::max();
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  // agents by id, so the output does not depend on track order
  std::vector<const Track *> tracks;
  for (const auto & t : scene.tracks) {
    if (!t.points.empty()) {
      tracks.push_back(&t);
      first = std::min(first, t.points.front().frame);
      last = std::max(last, t.points.back().frame);
    }
  }
  std::sort(tracks.begin(), tracks.end(), [](const Track * a, const Track * b) { return a->id < b->id; });
  std::vector<GraphSequence> out;
  if (tracks.empty()) {
    return out;
  }
  std::vector<std::unordered_map<std::int64_t, const AgentState *>> lookup(tracks.size());
  for (std::size_t a = 0; a < tracks.size(); ++a) {
    for (const auto & p : tracks[a]->points) {
      lookup[a][p.frame] = &p.state;
    }
  }
  const std::size_t steps = o.observed + o.horizon;
  const auto span = static_cast<std::int64_t>((steps - 1) * o.downsample + 1);
  const std::int64_t length = last - first + 1;
  for (std::int64_t start = first; start + span <= first + length; start += static_cast<std::int64_t>(o.stride)) {
    GraphSequence seq;
    seq.scene_id = scene.scene_id;
    seq.start_frame = start;
    seq.dt = dt;
    seq.radius = o.radius;
    std::vector<std::size_t> members;
    for (std::size_t a = 0; a < tracks.size(); ++a) {
      bool covered = true;
      for (std::size_t k = 0; k < steps && covered; ++k) {
        covered = lookup[a].count(start + static_cast<std::int64_t>(k * o.downsample)) > 0;
      }
      if (covered) {
        members.push_back(a);
        seq.agent_ids.push_back(tracks[a]->id);
      }
    }
    if (members.empty()) {
      continue;
    }
    for (std::size_t k = 0; k < steps; ++k) {
      std::vector<AgentState> frame;
      frame.reserve(members.size());
      for (std::size_t a : members) {
        frame.push_back(*lookup[a].at(start + static_cast<std::int64_t>(k * o.downsample)));
      }
      (k < o.observed ? seq.observed : seq.future).push_back(std::move(frame));
    }
    build_graphs(seq);
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<GraphSequence> make_windows(const std::vector<Scene> & scenes, const WindowOptions & options)
{
  std::vector<std::vector<GraphSequence>> parts(scenes.size());
  numcore::parallel_for(scenes.size(), [&](std::size_t i) { parts[i] = make_windows(scenes[i], options); });
  std::vector<GraphSequence> out;
  for (auto & p : parts) {
    std::move(p.begin(), p.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace ssmtraj::data
