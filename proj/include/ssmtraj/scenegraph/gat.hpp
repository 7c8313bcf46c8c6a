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

#ifndef SSMTRAJ_SCENEGRAPH_GAT_HPP_
#define SSMTRAJ_SCENEGRAPH_GAT_HPP_

#include "ssmtraj/numcore/layers.hpp"
#include "ssmtraj/numcore/rng.hpp"
#include "ssmtraj/scenegraph/graph.hpp"

#include <string>

namespace ssmtraj::scenegraph
{

/**
 * Dynamic graph attention with edge features. For head k,
 *
 *   score(v, tau) = a_k . leaky(W_att,k [h_v | h_tau | e_{v,tau}])
 *   alpha(v, .)   = softmax of score over the inclusive neighbourhood of v
 *   out_k(v)      = b_k + W1_k h_v + sum_tau alpha(v, tau) W2_k h_tau
 *
 * and the head outputs are concatenated. Weights are stored for the
 * row-vector convention, head-major along their output axis.
 */
struct GatParams
{
  Tensor w_att;  ///< [2F + Fe, heads * att_dim]
  Tensor a_att;  ///< [heads * att_dim]
  Tensor w1;     ///< [F, heads * out_dim]
  Tensor w2;     ///< [F, heads * out_dim]
  Tensor b;      ///< [heads * out_dim]
  std::size_t heads{3};
  double leak{0.2};

  static GatParams init(
    std::size_t in_features, std::size_t edge_features, std::size_t heads, std::size_t att_dim,
    std::size_t out_dim, numcore::Rng & rng, double leak = 0.2);

  std::size_t in_features() const { return w1.dim(0); }
  std::size_t edge_features() const { return w_att.dim(0) - 2 * in_features(); }
  std::size_t att_dim() const { return a_att.dim(0) / heads; }
  std::size_t out_features() const { return w1.dim(1); }
  std::size_t head_dim() const { return out_features() / heads; }

  void collect(const std::string & prefix, numcore::ParameterList & out) const;
  GatParams detached() const;
  /// Throws ContractViolation on inconsistent shapes.
  void validate() const;
};

/// Attention weights of every edge, [E, heads], in the graph's edge order.
Tensor gat_edge_attention(
  const Tensor & node_features, const std::vector<std::uint32_t> & targets,
  const std::vector<std::uint32_t> & sources, const Tensor & edge_features,
  const GatParams & params);

/// Layer output [n, heads * out_dim] for explicit features and topology.
Tensor gat_forward(
  const Tensor & node_features, const std::vector<std::uint32_t> & targets,
  const std::vector<std::uint32_t> & sources, const Tensor & edge_features,
  const GatParams & params);

struct NodeAttention
{
  std::vector<std::uint32_t> neighbours;  ///< inclusive neighbourhood, edge order
  Tensor weights;                         ///< [neighbours, heads]
};

/// Attention of one node (by position in the graph) over its neighbourhood.
NodeAttention gat_attention(const SceneGraph & graph, const GatParams & params, std::size_t node);

Tensor gat_layer(const SceneGraph & graph, const GatParams & params);

}  // namespace ssmtraj::scenegraph

#endif  // SSMTRAJ_SCENEGRAPH_GAT_HPP_
