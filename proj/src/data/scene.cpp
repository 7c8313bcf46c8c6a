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


#include "ssmtraj/data/scene.hpp"

#include "ssmtraj/numcore/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ssmtraj::data
{

namespace
{

bool finite(const AgentState & s)
{
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.vx) && std::isfinite(s.vy);
}

numcore::Tensor frame_tensor(const std::vector<AgentState> & frame) { return dynamics::to_tensor(frame); }

bool same_values(const numcore::Tensor & a, const numcore::Tensor & b)
{
  return a.shape() == b.shape() && std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

}  // namespace

void validate(const Scene & scene)
{
  require(scene.frame_rate > 0.0, "scene: frame rate must be positive");
  for (const auto & t : scene.tracks) {
    for (std::size_t k = 0; k < t.points.size(); ++k) {
      require(finite(t.points[k].state), "scene: non-finite track value");
      require(k == 0 || t.points[k].frame > t.points[k - 1].frame, "scene: frames must increase within a track");
    }
  }
}

void build_graphs(GraphSequence & seq)
{
  seq.graphs.clear();
  seq.graphs.reserve(seq.observed.size());
  for (const auto & frame : seq.observed) {
    seq.graphs.push_back(scenegraph::build_graph(seq.agent_ids, frame_tensor(frame), seq.radius));
  }
}

void validate(const GraphSequence & seq)
{
  const std::size_t n = seq.num_agents();
  require(n >= 1, "sample: no agents");
  require(std::is_sorted(seq.agent_ids.begin(), seq.agent_ids.end()), "sample: agent ids must be sorted");
  require(
    std::adjacent_find(seq.agent_ids.begin(), seq.agent_ids.end()) == seq.agent_ids.end(),
    "sample: agent ids must be unique");
  require(seq.observed_steps() >= 2, "sample: at least two observed frames");
  require(seq.horizon() >= 1, "sample: at least one future frame");
  require(seq.dt > 0.0, "sample: dt must be positive");
  require(
    static_cast<double>(seq.observed_steps()) * seq.dt <= kMaxObservationSeconds + 1e-9,
    "sample: observation window longer than 3 s");
  for (const auto * part : {&seq.observed, &seq.future}) {
    for (const auto & frame : *part) {
      require(frame.size() == n, "sample: agent set changes within the window");
      for (const auto & s : frame) {
        require(finite(s), "sample: non-finite state");
      }
    }
  }
  require(seq.graphs.size() == seq.observed_steps(), "sample: one graph per observed frame");
  for (const auto & g : seq.graphs) {
    require(g.node_ids == seq.agent_ids, "sample: graph nodes differ from the agent set");
    scenegraph::validate(g);
  }
}

bool equal(const GraphSequence & a, const GraphSequence & b)
{
  if (
    a.scene_id != b.scene_id || a.start_frame != b.start_frame || a.dt != b.dt || a.radius != b.radius ||
    a.agent_ids != b.agent_ids || a.observed != b.observed || a.future != b.future ||
    a.graphs.size() != b.graphs.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.graphs.size(); ++k) {
    const auto & ga = a.graphs[k];
    const auto & gb = b.graphs[k];
    if (
      ga.node_ids != gb.node_ids || ga.targets != gb.targets || ga.sources != gb.sources ||
      !same_values(ga.node_features, gb.node_features) || !same_values(ga.edge_features, gb.edge_features)) {
      return false;
    }
  }
  return true;
}

}  // namespace ssmtraj::data
