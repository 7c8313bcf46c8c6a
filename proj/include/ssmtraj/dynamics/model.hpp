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

#ifndef SSMTRAJ_DYNAMICS_MODEL_HPP_
#define SSMTRAJ_DYNAMICS_MODEL_HPP_

#include "ssmtraj/numcore/layers.hpp"
#include "ssmtraj/numcore/rng.hpp"

#include <array>
#include <string>
#include <vector>

namespace ssmtraj::dynamics
{

using numcore::Tensor;

/// Position in meters and velocity in m/s.
struct AgentState
{
  double x{0.0};
  double y{0.0};
  double vx{0.0};
  double vy{0.0};

  std::array<double, 4> as_array() const { return {x, y, vx, vy}; }
  bool operator==(const AgentState &) const = default;
};

inline constexpr std::size_t kStateDim = 4;

/// Rows of agent states as an [n, 4] tensor and back.
Tensor to_tensor(const std::vector<AgentState> & states);
std::vector<AgentState> to_states(const Tensor & t);

enum class DynamicsMode
{
  Linear,   ///< x' = A x + B u
  Koopman,  ///< x' = C (A phi(x) + B u), phi(x) = x | g(x)
};

struct DynamicsOptions
{
  DynamicsMode mode{DynamicsMode::Koopman};
  double dt{0.04};
  std::size_t state_dim{kStateDim};
  std::size_t control_dim{4};
  std::size_t koopman_hidden{32};
  std::size_t koopman_layers{2};
  std::size_t koopman_features{12};
  /// states are multiplied by this before entering the feature network
  double koopman_input_scale{0.1};
  /// start A at the position/velocity chain instead of zero
  bool kinematic_init{true};
  double control_gain{0.1};
};

/**
 * Continuous-time agent dynamics, sampled every `dt` seconds. Batched over
 * rows: x is [R, d] and u is [R, du]. In Koopman mode A and B act on the
 * lifted state phi(x) of width d + features, and the truncation C keeps the
 * first d entries of the result.
 */
class DynamicsModel
{
public:
  DynamicsModel() = default;
  DynamicsModel(const DynamicsOptions & options, numcore::Rng & rng);
  /// Linear mode with the given A [d, d] and B [d, du].
  static DynamicsModel linear(Tensor a, Tensor b, double dt);
  /// Koopman mode with explicit A [L, L], B [L, du] and feature network.
  static DynamicsModel koopman(Tensor a, Tensor b, numcore::Mlp features, double dt, double input_scale = 1.0);

  DynamicsMode mode() const { return mode_; }
  double dt() const { return dt_; }
  std::size_t state_dim() const { return d_; }
  std::size_t lifted_dim() const { return a_.dim(0); }
  std::size_t control_dim() const { return b_.dim(1); }
  const Tensor & a() const { return a_; }
  const Tensor & b() const { return b_; }
  const numcore::Mlp & features() const { return phi_; }
  double input_scale() const { return input_scale_; }

  /// phi(x), [R, L]; the identity in linear mode.
  Tensor lift(const Tensor & x) const;
  Tensor state_derivative(const Tensor & x, const Tensor & u) const;
  /// x + dt * x'; throws DivergenceError on non-finite output.
  Tensor euler_step(const Tensor & x, const Tensor & u) const;
  /// States after 1..H steps; controls[k] drives step k + 1.
  std::vector<Tensor> rollout(const Tensor & x0, const std::vector<Tensor> & controls) const;
  /**
   * d euler_step / dx per row, [R, d, d], in closed form and on the tape,
   * so it can be differentiated w.r.t. both x and the parameters.
   */
  Tensor transition_matrix(const Tensor & x) const;

  /**
   * Mean over steps and rows of |(phi(x_{t+1}) - phi(x_t)) / dt - A phi(x_t) - B u_t|.
   * states holds T >= 2 entries, controls at least T - 1.
   */
  Tensor residual_loss(const std::vector<Tensor> & states, const std::vector<Tensor> & controls) const;

  void collect(const std::string & prefix, numcore::ParameterList & out) const;
  DynamicsModel detached() const;

private:
  void check(const Tensor & x, const Tensor & u) const;

  DynamicsMode mode_{DynamicsMode::Linear};
  Tensor a_;
  Tensor b_;
  numcore::Mlp phi_;
  double input_scale_{1.0};
  double dt_{0.04};
  std::size_t d_{kStateDim};
};

/// Single-agent conveniences over the batched API.
AgentState euler_step(const AgentState & x, const std::vector<double> & u, const DynamicsModel & model);
std::vector<AgentState> rollout(
  const AgentState & x0, const std::vector<std::vector<double>> & controls, const DynamicsModel & model);

}  // namespace ssmtraj::dynamics

#endif  // SSMTRAJ_DYNAMICS_MODEL_HPP_
