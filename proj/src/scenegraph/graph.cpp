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

#include "ssmtraj/scenegraph/graph.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssmtraj::scenegraph
{

SceneGraph build_graph(
  const std::vector<std::int64_t> & node_ids, const Tensor & states, double radius)
{
  require(states.defined() && states.rank() == 2, "build_graph expects [n, F] states");
  require(states.dim(1) >= 2, "build_graph needs positions in the first two columns");
  require(node_ids.size() == states.dim(0), "build_graph: one id per state row");
  require(states.all_finite(), "build_graph: non-finite state");
  const std::size_t n = node_ids.size();
  const std::size_t f = states.dim(1);
  const auto s = states.values();

  std::vector<std::uint32_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), 0u);
  std::stable_sort(by_id.begin(), by_id.end(), [&](auto a, auto b) {
    return node_ids[a] < node_ids[b];
  });

  SceneGraph g;
  g.node_ids = node_ids;
  g.node_features = states.detach();
  std::vector<double> feats;
  for (std::uint32_t v = 0; v < n; ++v) {
    const double xv = s[v * f];
    const double yv = s[v * f + 1];
    for (const std::uint32_t tau : by_id) {
      const double dx = s[tau * f] - xv;
      const double dy = s[tau * f + 1] - yv;
      const double dist = std::hypot(dx, dy);
      if (tau != v && !(dist <= radius)) {
        continue;
      }
      g.targets.push_back(v);
      g.sources.push_back(tau);
      feats.insert(feats.end(), {dx, dy, dist});
    }
  }
  g.edge_features = Tensor({g.num_edges(), kEdgeFeatureDim}, std::move(feats));
  return g;
}

SceneGraph build_graph(const Tensor & states, double radius)
{
  require(states.defined() && states.rank() == 2, "build_graph expects [n, F] states");
  std::vector<std::int64_t> ids(states.dim(0));
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  return build_graph(ids, states, radius);
}

SceneGraph with_features(const SceneGraph & graph, Tensor node_features)
{
  require(
    node_features.rank() == 2 && node_features.dim(0) == graph.num_nodes(),
    "with_features: one feature row per node");
  SceneGraph g = graph;
  g.node_features = std::move(node_features);
  return g;
}

SceneGraph merge_graphs(const std::vector<SceneGraph> & graphs)
{
  require(!graphs.empty(), "merge_graphs needs at least one graph");
  SceneGraph out;
  std::vector<Tensor> nodes;
  std::vector<Tensor> edges;
  std::uint32_t offset = 0;
  for (const auto & g : graphs) {
    out.node_ids.insert(out.node_ids.end(), g.node_ids.begin(), g.node_ids.end());
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      out.targets.push_back(g.targets[k] + offset);
      out.sources.push_back(g.sources[k] + offset);
    }
    nodes.push_back(g.node_features);
    edges.push_back(g.edge_features);
    offset += static_cast<std::uint32_t>(g.num_nodes());
  }
  out.node_features = numcore::concat(nodes, 0);
  out.edge_features = numcore::concat(edges, 0);
  return out;
}

void validate(const SceneGraph & g)
{
  const std::size_t n = g.num_nodes();
  require(g.node_features.defined() && g.node_features.rank() == 2, "graph needs [n, F] features");
  require(g.node_features.dim(0) == n, "graph feature rows differ from node count");
  require(g.sources.size() == g.targets.size(), "graph edge arrays differ in length");
  require(
    g.edge_features.rank() == 2 && g.edge_features.dim(0) == g.num_edges() &&
      g.edge_features.dim(1) == kEdgeFeatureDim,
    "graph edge features must be [E, 3]");
  std::vector<bool> self(n, false);
  const auto e = g.edge_features.values();
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    require(g.targets[k] < n && g.sources[k] < n, "graph edge references a missing node");
    if (g.targets[k] == g.sources[k]) {
      self[g.targets[k]] = true;
    }
    const double dx = e[3 * k];
    const double dy = e[3 * k + 1];
    require(std::abs(std::hypot(dx, dy) - e[3 * k + 2]) <= 1e-9, "edge distance disagrees with displacement");
  }
  require(std::all_of(self.begin(), self.end(), [](bool b) { return b; }), "graph node without self-loop");
}

}  // namespace ssmtraj::scenegraph
