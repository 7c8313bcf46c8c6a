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

#include "ssmtraj/dynamics/model.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"

namespace ssmtraj::dynamics
{

using namespace numcore;

Tensor to_tensor(const std::vector<AgentState> & states)
{
  require(!states.empty(), "to_tensor needs at least one state");
  std::vector<double> v;
  v.reserve(states.size() * kStateDim);
  for (const auto & s : states) {
    v.insert(v.end(), {s.x, s.y, s.vx, s.vy});
  }
  return Tensor({states.size(), kStateDim}, std::move(v));
}

std::vector<AgentState> to_states(const Tensor & t)
{
  require(t.rank() == 2 && t.dim(1) == kStateDim, "to_states expects [n, 4]");
  std::vector<AgentState> out(t.dim(0));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {t.at(i, 0), t.at(i, 1), t.at(i, 2), t.at(i, 3)};
  }
  return out;
}

DynamicsModel::DynamicsModel(const DynamicsOptions & o, Rng & rng)
: mode_(o.mode), input_scale_(o.koopman_input_scale), dt_(o.dt), d_(o.state_dim)
{
  require(o.dt > 0.0, "DynamicsModel: dt must be positive");
  require(o.state_dim >= 1 && o.control_dim >= 1, "DynamicsModel: dimensions must be positive");
  std::size_t lifted = d_;
  if (mode_ == DynamicsMode::Koopman) {
    require(o.koopman_features >= 1, "DynamicsModel: Koopman mode needs learned features");
    std::vector<std::size_t> widths{d_};
    for (std::size_t i = 0; i < o.koopman_layers; ++i) {
      widths.push_back(o.koopman_hidden);
    }
    widths.push_back(o.koopman_features);
    phi_ = Mlp(widths, rng, 0.1);
    lifted += o.koopman_features;
  }
  std::vector<double> a(lifted * lifted, 0.0);
  if (o.kinematic_init && d_ % 2 == 0) {
    // first half of the state is position, second half its rate
    const std::size_t half = d_ / 2;
    for (std::size_t i = 0; i < half; ++i) {
      a[i * lifted + half + i] = 1.0;
    }
  }
  a_ = Tensor({lifted, lifted}, std::move(a), true);
  b_ = glorot_uniform(lifted, o.control_dim, rng, o.control_gain);
}

DynamicsModel DynamicsModel::linear(Tensor a, Tensor b, double dt)
{
  require(dt > 0.0, "DynamicsModel: dt must be positive");
  require(a.rank() == 2 && a.dim(0) == a.dim(1), "DynamicsModel: A must be square");
  require(b.rank() == 2 && b.dim(0) == a.dim(0), "DynamicsModel: B rows must match A");
  DynamicsModel m;
  m.mode_ = DynamicsMode::Linear;
  m.d_ = a.dim(0);
  m.a_ = std::move(a);
  m.b_ = std::move(b);
  m.dt_ = dt;
  return m;
}

DynamicsModel DynamicsModel::koopman(Tensor a, Tensor b, Mlp features, double dt, double input_scale)
{
  require(dt > 0.0, "DynamicsModel: dt must be positive");
  require(a.rank() == 2 && a.dim(0) == a.dim(1), "DynamicsModel: A must be square");
  require(b.rank() == 2 && b.dim(0) == a.dim(0), "DynamicsModel: B rows must match A");
  require(!features.empty(), "DynamicsModel: Koopman mode needs a feature network");
  require(
    features.in_features() + features.out_features() == a.dim(0),
    "DynamicsModel: lifted width must equal d plus the feature count");
  DynamicsModel m;
  m.mode_ = DynamicsMode::Koopman;
  m.d_ = features.in_features();
  m.a_ = std::move(a);
  m.b_ = std::move(b);
  m.phi_ = std::move(features);
  m.dt_ = dt;
  m.input_scale_ = input_scale;
  return m;
}

void DynamicsModel::check(const Tensor & x, const Tensor & u) const
{
  require(x.rank() == 2 && x.dim(1) == d_, "dynamics: state must be [R, d]");
  require(u.rank() == 2 && u.dim(1) == control_dim(), "dynamics: control must be [R, du]");
  require(u.dim(0) == x.dim(0), "dynamics: state and control rows differ");
}

Tensor DynamicsModel::lift(const Tensor & x) const
{
  require(x.rank() == 2 && x.dim(1) == d_, "dynamics: state must be [R, d]");
  if (mode_ == DynamicsMode::Linear) {
    return x;
  }
  return concat({x, phi_.forward(x * input_scale_)}, 1);
}

Tensor DynamicsModel::state_derivative(const Tensor & x, const Tensor & u) const
{
  check(x, u);
  // only the first d rows of A and B survive the truncation
  const Tensor a_top = mode_ == DynamicsMode::Linear ? a_ : slice(a_, 0, 0, d_);
  const Tensor b_top = mode_ == DynamicsMode::Linear ? b_ : slice(b_, 0, 0, d_);
  return matmul(lift(x), transpose(a_top)) + matmul(u, transpose(b_top));
}

Tensor DynamicsModel::euler_step(const Tensor & x, const Tensor & u) const
{
  Tensor next = x + state_derivative(x, u) * dt_;
  if (!next.all_finite()) {
    throw DivergenceError("dynamics", "Euler step produced a non-finite state");
  }
  return next;
}

std::vector<Tensor> DynamicsModel::rollout(const Tensor & x0, const std::vector<Tensor> & controls) const
{
  require(!controls.empty(), "rollout needs at least one control step");
  std::vector<Tensor> out;
  out.reserve(controls.size());
  Tensor x = x0;
  for (const auto & u : controls) {
    x = euler_step(x, u);
    out.push_back(x);
  }
  return out;
}

Tensor DynamicsModel::transition_matrix(const Tensor & x) const
{
  require(x.rank() == 2 && x.dim(1) == d_, "dynamics: state must be [R, d]");
  const std::size_t rows = x.dim(0);
  // row (r, i) of every [R * d, .] block below belongs to row i of agent r's matrix
  std::vector<std::uint32_t> tile(rows * d_);
  std::vector<std::uint32_t> agent(rows * d_);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < d_; ++i) {
      tile[r * d_ + i] = static_cast<std::uint32_t>(i);
      agent[r * d_ + i] = static_cast<std::uint32_t>(r);
    }
  }
  const Tensor a_xx = mode_ == DynamicsMode::Linear ? a_ : slice(slice(a_, 0, 0, d_), 1, 0, d_);
  Tensor f = index_select(Tensor::eye(d_) + a_xx * dt_, 0, tile);
  if (mode_ == DynamicsMode::Koopman) {
    const auto & layers = phi_.layers();
    std::vector<Tensor> pre;
    Tensor h = x * input_scale_;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
      pre.push_back(layers[l].forward(h));
      h = tanh(pre.back());
    }
    const Tensor a_xf = slice(slice(a_, 0, 0, d_), 1, d_, a_.dim(0));
    // A_xf d(phi)/dx, built right to left through the tanh layers
    Tensor m = index_select(matmul(a_xf, transpose(layers.back().weight())), 0, tile);
    for (std::size_t l = pre.size(); l-- > 0;) {
      const Tensor t = tanh(pre[l]);
      m = m * index_select(1.0 - t * t, 0, agent);
      m = matmul(m, transpose(layers[l].weight()));
    }
    f = f + m * (input_scale_ * dt_);
  }
  return reshape(f, {rows, d_, d_});
}

Tensor DynamicsModel::residual_loss(const std::vector<Tensor> & states, const std::vector<Tensor> & controls) const
{
  require(states.size() >= 2, "residual loss needs at least two states");
  require(controls.size() + 1 >= states.size(), "residual loss needs one control per transition");
  std::vector<Tensor> lifted;
  lifted.reserve(states.size());
  for (const auto & s : states) {
    lifted.push_back(lift(s));
  }
  const Tensor at = transpose(a_);
  const Tensor bt = transpose(b_);
  Tensor total;
  std::size_t rows = 0;
  for (std::size_t t = 0; t + 1 < states.size(); ++t) {
    check(states[t], controls[t]);
    Tensor rate = (lifted[t + 1] - lifted[t]) * (1.0 / dt_);
    Tensor r = sum(norm_last(rate - matmul(lifted[t], at) - matmul(controls[t], bt)));
    total = total.defined() ? total + r : r;
    rows += states[t].dim(0);
  }
  return total * (1.0 / static_cast<double>(rows));
}

void DynamicsModel::collect(const std::string & prefix, ParameterList & out) const
{
  out.push_back({prefix + ".A", a_});
  out.push_back({prefix + ".B", b_});
  if (mode_ == DynamicsMode::Koopman) {
    phi_.collect(prefix + ".phi", out);
  }
}

DynamicsModel DynamicsModel::detached() const
{
  DynamicsModel m = *this;
  m.a_ = a_.detach();
  m.b_ = b_.detach();
  if (!phi_.empty()) {
    m.phi_ = phi_.detached();
  }
  return m;
}

AgentState euler_step(const AgentState & x, const std::vector<double> & u, const DynamicsModel & model)
{
  Tensor ut({1, u.size()}, u);
  return to_states(model.euler_step(to_tensor({x}), ut)).front();
}

std::vector<AgentState> rollout(
  const AgentState & x0, const std::vector<std::vector<double>> & controls, const DynamicsModel & model)
{
  std::vector<Tensor> us;
  for (const auto & u : controls) {
    us.push_back(Tensor({1, u.size()}, u));
  }
  std::vector<AgentState> out;
  for (const auto & s : model.rollout(to_tensor({x0}), us)) {
    out.push_back(to_states(s).front());
  }
  return out;
}

}  // namespace ssmtraj::dynamics
