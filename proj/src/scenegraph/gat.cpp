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

#include "ssmtraj/scenegraph/gat.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"

#include <cmath>

namespace ssmtraj::scenegraph
{

using namespace numcore;

GatParams GatParams::init(
  std::size_t in_features, std::size_t edge_features, std::size_t heads, std::size_t att_dim,
  std::size_t out_dim, Rng & rng, double leak)
{
  require(heads >= 1 && att_dim >= 1 && out_dim >= 1, "GatParams: sizes must be positive");
  GatParams p;
  p.heads = heads;
  p.leak = leak;
  p.w_att = glorot_uniform(2 * in_features + edge_features, heads * att_dim, rng);
  std::vector<double> a(heads * att_dim);
  const double limit = std::sqrt(3.0 / static_cast<double>(att_dim));
  for (auto & x : a) {
    x = rng.uniform(-limit, limit);
  }
  p.a_att = Tensor({heads * att_dim}, std::move(a), true);
  p.w1 = glorot_uniform(in_features, heads * out_dim, rng);
  p.w2 = glorot_uniform(in_features, heads * out_dim, rng);
  p.b = Tensor::zeros({heads * out_dim}, true);
  return p;
}

void GatParams::collect(const std::string & prefix, ParameterList & out) const
{
  out.push_back({prefix + ".w_att", w_att});
  out.push_back({prefix + ".a_att", a_att});
  out.push_back({prefix + ".w1", w1});
  out.push_back({prefix + ".w2", w2});
  out.push_back({prefix + ".b", b});
}

GatParams GatParams::detached() const
{
  GatParams p = *this;
  p.w_att = w_att.detach();
  p.a_att = a_att.detach();
  p.w1 = w1.detach();
  p.w2 = w2.detach();
  p.b = b.detach();
  return p;
}

void GatParams::validate() const
{
  require(heads >= 1, "GatParams: heads must be positive");
  require(w_att.rank() == 2 && w1.rank() == 2 && w2.rank() == 2, "GatParams: weights must be matrices");
  require(a_att.rank() == 1 && a_att.dim(0) == w_att.dim(1), "GatParams: a_att must match W_att output");
  require(a_att.dim(0) % heads == 0, "GatParams: attention width not divisible by heads");
  require(w1.shape() == w2.shape(), "GatParams: W1 and W2 differ in shape");
  require(w1.dim(1) % heads == 0, "GatParams: output width not divisible by heads");
  require(b.rank() == 1 && b.dim(0) == w1.dim(1), "GatParams: bias length");
  require(w_att.dim(0) >= 2 * w1.dim(0), "GatParams: W_att input narrower than 2F");
}

namespace
{

void check_inputs(
  const Tensor & h, const std::vector<std::uint32_t> & targets,
  const std::vector<std::uint32_t> & sources, const Tensor & e, const GatParams & p)
{
  p.validate();
  require(h.rank() == 2 && h.dim(1) == p.in_features(), "GAT: node feature width mismatch");
  require(targets.size() == sources.size() && !targets.empty(), "GAT: malformed edge list");
  require(
    e.rank() == 2 && e.dim(0) == targets.size() && e.dim(1) == p.edge_features(),
    "GAT: edge feature shape mismatch");
}

}  // namespace

Tensor gat_edge_attention(
  const Tensor & h, const std::vector<std::uint32_t> & targets,
  const std::vector<std::uint32_t> & sources, const Tensor & e, const GatParams & p)
{
  check_inputs(h, targets, sources, e, p);
  const std::size_t edges = targets.size();
  Tensor z = concat({index_select(h, 0, targets), index_select(h, 0, sources), e}, 1);
  Tensor s = leaky_relu(matmul(z, p.w_att), p.leak) * p.a_att;
  Tensor scores = sum(reshape(s, {edges, p.heads, p.att_dim()}), 2);
  return segment_softmax(scores, targets, h.dim(0));
}

Tensor gat_forward(
  const Tensor & h, const std::vector<std::uint32_t> & targets,
  const std::vector<std::uint32_t> & sources, const Tensor & e, const GatParams & p)
{
  Tensor alpha = gat_edge_attention(h, targets, sources, e, p);
  const std::size_t edges = targets.size();
  Tensor msg = index_select(matmul(h, p.w2), 0, sources);
  msg = reshape(msg, {edges, p.heads, p.head_dim()}) * reshape(alpha, {edges, p.heads, 1});
  Tensor agg = index_add(reshape(msg, {edges, p.out_features()}), targets, h.dim(0));
  return matmul(h, p.w1) + p.b + agg;
}

NodeAttention gat_attention(const SceneGraph & graph, const GatParams & params, std::size_t node)
{
  require(node < graph.num_nodes(), "gat_attention: node out of range");
  Tensor alpha = gat_edge_attention(
    graph.node_features, graph.targets, graph.sources, graph.edge_features, params);
  NodeAttention out;
  std::vector<std::uint32_t> rows;
  for (std::uint32_t k = 0; k < graph.num_edges(); ++k) {
    if (graph.targets[k] == node) {
      rows.push_back(k);
      out.neighbours.push_back(graph.sources[k]);
    }
  }
  out.weights = index_select(alpha, 0, rows);
  return out;
}

Tensor gat_layer(const SceneGraph & graph, const GatParams & params)
{
  return gat_forward(graph.node_features, graph.targets, graph.sources, graph.edge_features, params);
}

}  // namespace ssmtraj::scenegraph
