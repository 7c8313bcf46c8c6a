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


#include "ssmtraj/control/decoder.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"

namespace ssmtraj::control
{

using namespace numcore;

ControlDecoder::ControlDecoder(const ControlOptions & o, Rng & rng)
: graph_considered_(o.graph_considered), state_scale_(o.state_scale)
{
  require(o.control_dim >= 1 && o.state_dim >= 1, "ControlDecoder: dimensions must be positive");
  gnn_ = scenegraph::GatParams::init(
    o.state_dim, scenegraph::kEdgeFeatureDim, o.gat_heads, o.gat_att_dim, o.gat_head_dim, rng);
  mlp_state_ = Mlp({o.state_dim, o.hidden, o.state_features}, rng);
  const std::size_t width = gnn_.out_features() + o.state_features;
  mlp_ctrl_ = Mlp({o.control_dim, o.hidden, width}, rng);
  a3_ = Tensor::eye(o.control_dim).clone(true);
  // glorot is symmetric in its fans, so draw B3 directly as [du, d_g]
  b3_ = glorot_uniform(o.control_dim, width, rng, o.b_gain);
}

ControlDecoder::ControlDecoder(
  Tensor a3, Tensor b3, scenegraph::GatParams gnn, Mlp mlp_state, Mlp mlp_ctrl, bool graph_considered,
  double state_scale)
: a3_(std::move(a3)),
  b3_(std::move(b3)),
  gnn_(std::move(gnn)),
  mlp_state_(std::move(mlp_state)),
  mlp_ctrl_(std::move(mlp_ctrl)),
  graph_considered_(graph_considered),
  state_scale_(state_scale)
{
  require(a3_.rank() == 2 && a3_.dim(0) == a3_.dim(1), "ControlDecoder: A3 must be square");
  gnn_.validate();
  require(!mlp_state_.empty() && !mlp_ctrl_.empty(), "ControlDecoder: both MLPs are required");
  require(gnn_.in_features() == mlp_state_.in_features(), "ControlDecoder: gnn and state MLP inputs differ");
  const std::size_t width = gnn_.out_features() + mlp_state_.out_features();
  require(mlp_ctrl_.out_features() == width, "ControlDecoder: control MLP width must match the state branch");
  require(mlp_ctrl_.in_features() == a3_.dim(0), "ControlDecoder: control MLP input must be du");
  require(
    b3_.rank() == 2 && b3_.dim(0) == a3_.dim(0) && b3_.dim(1) == width, "ControlDecoder: B3 must be [du, d_g]");
}

Tensor ControlDecoder::g(const Tensor & x, const Tensor & u, const scenegraph::SceneGraph & graph) const
{
  require(x.rank() == 2 && x.dim(1) == state_dim(), "g: states must be [n, d]");
  require(u.rank() == 2 && u.dim(1) == control_dim(), "g: controls must be [n, du]");
  require(x.dim(0) == u.dim(0), "g: states and controls have different agent counts");
  require(graph.num_nodes() == x.dim(0), "g: graph nodes do not match the agents");
  const Tensor xs = state_scale_ == 1.0 ? x : x * state_scale_;
  const Tensor gnn_part =
    graph_considered_
      ? scenegraph::gat_forward(xs, graph.targets, graph.sources, graph.edge_features, gnn_)
      : Tensor::zeros({x.dim(0), gnn_.out_features()});
  return concat({gnn_part, mlp_state_.forward(xs)}, 1) * mlp_ctrl_.forward(u);
}

Tensor ControlDecoder::step(const Tensor & u, const Tensor & x, const scenegraph::SceneGraph & graph) const
{
  return matmul(u, transpose(a3_)) + matmul(g(x, u, graph), transpose(b3_));
}

void ControlDecoder::collect(const std::string & prefix, ParameterList & out) const
{
  out.push_back({prefix + ".A3", a3_});
  out.push_back({prefix + ".B3", b3_});
  if (graph_considered_) {
    gnn_.collect(prefix + ".gnn", out);
  }
  mlp_state_.collect(prefix + ".state", out);
  mlp_ctrl_.collect(prefix + ".ctrl", out);
}

ControlDecoder ControlDecoder::detached() const
{
  ControlDecoder d = *this;
  d.a3_ = a3_.detach();
  d.b3_ = b3_.detach();
  d.gnn_ = gnn_.detached();
  d.mlp_state_ = mlp_state_.detached();
  d.mlp_ctrl_ = mlp_ctrl_.detached();
  return d;
}

Tensor g_eval(const Tensor & x, const Tensor & u, const scenegraph::SceneGraph & last_graph, const ControlDecoder & decoder)
{
  return decoder.g(x, u, last_graph);
}

Tensor control_step(
  const Tensor & u, const Tensor & x, const scenegraph::SceneGraph & last_graph, const ControlDecoder & decoder)
{
  return decoder.step(u, x, last_graph);
}

Horizon decode_horizon(
  const Tensor & u0, const Tensor & x0, const scenegraph::SceneGraph & last_graph,
  const ControlDecoder & decoder, const dynamics::DynamicsModel & model, std::size_t horizon)
{
  require(horizon >= 1, "decode_horizon: horizon must be at least 1");
  require(model.control_dim() == decoder.control_dim(), "decode_horizon: control widths differ");
  Horizon out;
  out.controls.reserve(horizon);
  out.states.reserve(horizon);
  out.applied.reserve(horizon);
  Tensor u = u0;
  Tensor x = x0;
  for (std::size_t k = 0; k < horizon; ++k) {
    out.applied.push_back(u);
    x = model.euler_step(x, u);
    u = decoder.step(u, x, last_graph);
    if (!u.all_finite()) {
      throw DivergenceError("control", "control update produced a non-finite value");
    }
    out.states.push_back(x);
    out.controls.push_back(u);
  }
  return out;
}

}  // namespace ssmtraj::control
