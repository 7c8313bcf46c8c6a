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


#ifndef SSMTRAJ_DATA_SCENE_HPP_
#define SSMTRAJ_DATA_SCENE_HPP_

#include "ssmtraj/dynamics/model.hpp"
#include "ssmtraj/scenegraph/graph.hpp"

#include <cstdint>
#include <vector>

namespace ssmtraj::data
{

using dynamics::AgentState;

struct TrackPoint
{
  std::int64_t frame{0};
  AgentState state;
  bool operator==(const TrackPoint &) const = default;
};

struct Track
{
  std::int64_t id{0};
  std::vector<TrackPoint> points;  ///< strictly increasing frames
  bool operator==(const Track &) const = default;
};

/// One recording: every agent observed at a fixed frame rate.
struct Scene
{
  std::int64_t scene_id{0};
  double frame_rate{25.0};
  std::vector<Track> tracks;
  bool operator==(const Scene &) const = default;
};

/// Throws ContractViolation unless frames increase per track and values are finite.
void validate(const Scene & scene);

inline constexpr double kMaxObservationSeconds = 3.0;

/**
 * One training or evaluation sample. The agent set is fixed over the window
 * and ordered by id; row i of every frame is agent_ids[i].
 */
struct GraphSequence
{
  std::int64_t scene_id{0};
  std::int64_t start_frame{0};
  double dt{0.04};
  double radius{scenegraph::kDefaultRadius};
  std::vector<std::int64_t> agent_ids;
  std::vector<std::vector<AgentState>> observed;  ///< [T_obs][n]
  std::vector<std::vector<AgentState>> future;    ///< [t_f][n]
  std::vector<scenegraph::SceneGraph> graphs;     ///< one per observed frame

  std::size_t num_agents() const { return agent_ids.size(); }
  std::size_t observed_steps() const { return observed.size(); }
  std::size_t horizon() const { return future.size(); }
};

/// Rebuilds `graphs` from the observed states and radius.
void build_graphs(GraphSequence & seq);

/// Throws ContractViolation when an invariant of GraphSequence does not hold.
void validate(const GraphSequence & seq);

/// Field-by-field equality, graphs included.
bool equal(const GraphSequence & a, const GraphSequence & b);

}  // namespace ssmtraj::data

#endif  // SSMTRAJ_DATA_SCENE_HPP_
