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

#ifndef SSMTRAJ_SCENEGRAPH_GRAPH_HPP_
#define SSMTRAJ_SCENEGRAPH_GRAPH_HPP_

#include "ssmtraj/numcore/tensor.hpp"

#include <cstdint>
#include <vector>

namespace ssmtraj::scenegraph
{

using numcore::Tensor;

inline constexpr double kDefaultRadius = 30.0;
/// (dx, dy, distance)
inline constexpr std::size_t kEdgeFeatureDim = 3;

/**
 * One frame of agents. Edge k points from `sources[k]` (the neighbour tau)
 * into `targets[k]` (the receiving node v), so targets[k] aggregates over its
 * inclusive neighbourhood. Edges are grouped by target; within a group they
 * are ordered by node id, which keeps per-node reductions independent of the
 * order in which nodes were listed.
 */
struct SceneGraph
{
  std::vector<std::int64_t> node_ids;
  Tensor node_features;  ///< [n, F]; columns 0 and 1 are position in meters
  std::vector<std::uint32_t> targets;
  std::vector<std::uint32_t> sources;
  Tensor edge_features;  ///< [E, 3]: position of tau minus position of v, then |.|

  std::size_t num_nodes() const { return node_ids.size(); }
  std::size_t num_edges() const { return targets.size(); }
};

/**
 * Proximity graph of one frame. `states` is [n, F] with F >= 2 and positions
 * in the first two columns; the rows become the node features. Every node
 * gets a self-loop and a pair is connected both ways when their distance is
 * at most `radius`.
 */
SceneGraph build_graph(
  const std::vector<std::int64_t> & node_ids, const Tensor & states, double radius = kDefaultRadius);
/// Node ids 0..n-1.
SceneGraph build_graph(const Tensor & states, double radius = kDefaultRadius);

/// Same topology and edge features, new node features [n, F'].
SceneGraph with_features(const SceneGraph & graph, Tensor node_features);

/**
 * Disjoint union: node and edge indices of later graphs are offset by the
 * sizes of the earlier ones, and ids are kept as given.
 */
SceneGraph merge_graphs(const std::vector<SceneGraph> & graphs);

/// Throws ContractViolation when an invariant of SceneGraph does not hold.
void validate(const SceneGraph & graph);

}  // namespace ssmtraj::scenegraph

#endif  // SSMTRAJ_SCENEGRAPH_GRAPH_HPP_
