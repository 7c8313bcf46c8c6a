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


#ifndef SSMTRAJ_CONTROL_DECODER_HPP_
#define SSMTRAJ_CONTROL_DECODER_HPP_

#include "ssmtraj/dynamics/model.hpp"
#include "ssmtraj/numcore/layers.hpp"
#include "ssmtraj/scenegraph/gat.hpp"

#include <string>
#include <vector>

namespace ssmtraj::control
{

using numcore::Tensor;

struct ControlOptions
{
  std::size_t state_dim{dynamics::kStateDim};
  std::size_t control_dim{4};
  std::size_t hidden{64};
  /// width of the state MLP output
  std::size_t state_features{16};
  std::size_t gat_heads{3};
  std::size_t gat_att_dim{8};
  std::size_t gat_head_dim{8};
  bool graph_considered{true};
  /// estimated states are multiplied by this before entering g
  double state_scale{1.0};
  double b_gain{0.1};
};

/**
 * Evolves per-agent controls over the prediction horizon:
 *
 *   u' = A3 u + B3 g(x, u),   g = [gnn(x) | mlp_state(x)] * mlp_ctrl(u)
 *
 * where gnn runs one attention layer over a frozen graph whose node features
 * are replaced by the estimated states. Rows are agents.
 */
class ControlDecoder
{
public:
  ControlDecoder() = default;
  ControlDecoder(const ControlOptions & options, numcore::Rng & rng);
  ControlDecoder(
    Tensor a3, Tensor b3, scenegraph::GatParams gnn, numcore::Mlp mlp_state, numcore::Mlp mlp_ctrl,
    bool graph_considered, double state_scale = 1.0);

  std::size_t control_dim() const { return a3_.dim(0); }
  std::size_t state_dim() const { return mlp_state_.in_features(); }
  std::size_t gnn_width() const { return gnn_.out_features(); }
  std::size_t g_width() const { return b3_.dim(1); }
  bool graph_considered() const { return graph_considered_; }
  double state_scale() const { return state_scale_; }
  const Tensor & a3() const { return a3_; }
  const Tensor & b3() const { return b3_; }
  const scenegraph::GatParams & gnn() const { return gnn_; }
  const numcore::Mlp & mlp_state() const { return mlp_state_; }
  const numcore::Mlp & mlp_ctrl() const { return mlp_ctrl_; }

  /// g for states x [n, d] and controls u [n, du] on `graph` (n nodes).
  Tensor g(const Tensor & x, const Tensor & u, const scenegraph::SceneGraph & graph) const;
  Tensor step(const Tensor & u, const Tensor & x, const scenegraph::SceneGraph & graph) const;

  /// The gnn weights are left out when the graph branch is disabled.
  void collect(const std::string & prefix, numcore::ParameterList & out) const;
  ControlDecoder detached() const;

private:
  Tensor a3_;
  Tensor b3_;
  scenegraph::GatParams gnn_;
  numcore::Mlp mlp_state_;
  numcore::Mlp mlp_ctrl_;
  bool graph_considered_{true};
  double state_scale_{1.0};
};

Tensor g_eval(
  const Tensor & x, const Tensor & u, const scenegraph::SceneGraph & last_graph,
  const ControlDecoder & decoder);
Tensor control_step(
  const Tensor & u, const Tensor & x, const scenegraph::SceneGraph & last_graph,
  const ControlDecoder & decoder);

struct Horizon
{
  std::vector<Tensor> controls;  ///< u_1 .. u_H
  std::vector<Tensor> states;    ///< x_1 .. x_H
  std::vector<Tensor> applied;   ///< u_0 .. u_{H-1}, the control that drove each state step
};

/**
 * Interleaved rollout. Step k first advances the state with u_{k-1}, then
 * updates the control from the new state estimate.
 */
Horizon decode_horizon(
  const Tensor & u0, const Tensor & x0, const scenegraph::SceneGraph & last_graph,
  const ControlDecoder & decoder, const dynamics::DynamicsModel & model, std::size_t horizon);

}  // namespace ssmtraj::control

#endif  // SSMTRAJ_CONTROL_DECODER_HPP_
