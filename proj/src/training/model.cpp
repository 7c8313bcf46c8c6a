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

#include "ssmtraj/training/model.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"

#include <cmath>

namespace ssmtraj::training
{

using namespace numcore;

namespace
{

constexpr std::size_t kD = dynamics::kStateDim;

// stream ids for the component initializers
enum Stream : std::uint64_t
{
  kEncoderGat = 1,
  kEncoder = 2,
  kDecoder = 3,
  kDynamics = 4,
  kNoise = 5,
};

scenegraph::SceneGraph scaled(const scenegraph::SceneGraph & g, Tensor features, double inv_pos)
{
  scenegraph::SceneGraph out = scenegraph::with_features(g, std::move(features));
  NoGradGuard guard;
  out.edge_features = g.edge_features * inv_pos;
  return out;
}

}  // namespace

Batch make_batch(const std::vector<const data::GraphSequence *> & samples, const ModelConfig & c)
{
  require(!samples.empty(), "make_batch: no samples");
  Batch b;
  b.samples = samples;
  b.steps = samples.front()->observed_steps();
  b.horizon = samples.front()->horizon();
  for (const auto * s : samples) {
    require(
      s->observed_steps() == b.steps && s->horizon() == b.horizon, "make_batch: samples differ in window length");
    require(std::abs(s->dt - c.dt) <= 1e-9, "make_batch: sample step differs from the configured dt");
    require(s->graphs.size() == b.steps, "make_batch: sample graphs are missing");
    b.offsets.push_back(b.rows);
    b.rows += s->num_agents();
  }
  const double ip = 1.0 / c.pos_scale;
  const double iv = 1.0 / c.vel_scale;
  for (const auto * s : samples) {
    double cx = 0.0;
    double cy = 0.0;
    for (const auto & a : s->observed.back()) {
      cx += a.x;
      cy += a.y;
    }
    cx /= static_cast<double>(s->num_agents());
    cy /= static_cast<double>(s->num_agents());
    b.center_x.insert(b.center_x.end(), s->num_agents(), cx);
    b.center_y.insert(b.center_y.end(), s->num_agents(), cy);
  }
  auto push = [&](std::vector<double> & out, const dynamics::AgentState & a, std::size_t row) {
    out.insert(out.end(), {(a.x - b.center_x[row]) * ip, (a.y - b.center_y[row]) * ip, a.vx * iv, a.vy * iv});
  };
  std::vector<double> obs;
  obs.reserve(b.steps * b.rows * kD);
  for (std::size_t t = 0; t < b.steps; ++t) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto & frame = samples[i]->observed[t];
      for (std::size_t a = 0; a < frame.size(); ++a) {
        push(obs, frame[a], b.offsets[i] + a);
      }
    }
  }
  b.observed = Tensor({b.steps, b.rows, kD}, std::move(obs));
  for (std::size_t k = 0; k < b.horizon; ++k) {
    std::vector<double> f;
    f.reserve(b.rows * kD);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto & frame = samples[i]->future[k];
      for (std::size_t a = 0; a < frame.size(); ++a) {
        push(f, frame[a], b.offsets[i] + a);
      }
    }
    b.future.push_back(Tensor({b.rows, kD}, std::move(f)));
  }
  std::vector<scenegraph::SceneGraph> all;
  all.reserve(b.steps * samples.size());
  for (std::size_t t = 0; t < b.steps; ++t) {
    for (const auto * s : samples) {
      all.push_back(s->graphs[t]);
    }
  }
  b.frames = scaled(scenegraph::merge_graphs(all), reshape(b.observed, {b.steps * b.rows, kD}), ip);
  std::vector<scenegraph::SceneGraph> last(all.end() - static_cast<std::ptrdiff_t>(samples.size()), all.end());
  b.last_graph =
    scaled(scenegraph::merge_graphs(last), reshape(slice(b.observed, 0, b.steps - 1, b.steps), {b.rows, kD}), ip);
  return b;
}

TrajectoryModel::TrajectoryModel(const ModelConfig & c) : config_(c)
{
  c.validate();
  const Rng root(c.seed);
  {
    Rng rng = root.fork(kEncoderGat);
    encoder_gat = scenegraph::GatParams::init(
      kD, scenegraph::kEdgeFeatureDim, c.gat_heads, c.gat_att_dim, c.gat_head_dim, rng);
  }
  {
    Rng rng = root.fork(kEncoder);
    seqssm::MixedMambaOptions o;
    o.block.state_expansion = c.mamba_state;
    o.block.conv_width = c.mamba_conv;
    o.block.block_expansion = c.mamba_expansion;
    o.block.dt_init = c.dt;
    o.mixed = c.mixed_mamba;
    encoder = seqssm::MixedMamba(encoder_gat.out_features() + kD, c.control_dim, o, rng);
  }
  {
    Rng rng = root.fork(kDecoder);
    control::ControlOptions o;
    o.state_dim = kD;
    o.control_dim = c.control_dim;
    o.hidden = c.decoder_hidden;
    o.state_features = c.decoder_state_features;
    o.gat_heads = c.gat_heads;
    o.gat_att_dim = c.gat_att_dim;
    o.gat_head_dim = c.gat_head_dim;
    o.graph_considered = c.graph_considered;
    decoder = control::ControlDecoder(o, rng);
  }
  {
    Rng rng = root.fork(kDynamics);
    dynamics::DynamicsOptions o;
    o.mode = c.linear_koopman ? dynamics::DynamicsMode::Linear : dynamics::DynamicsMode::Koopman;
    o.dt = c.dt;
    o.control_dim = c.control_dim;
    o.koopman_hidden = c.koopman_hidden;
    o.koopman_layers = c.koopman_layers;
    o.koopman_features = c.koopman_features;
    dynamics = dynamics::DynamicsModel(o, rng);
  }
  {
    Rng rng = root.fork(kNoise);
    noise = uncertainty::ProcessNoiseHead(c.control_dim, kD, rng, uncertainty::kQFloor, c.q_init);
  }
}

ForwardOutput TrajectoryModel::forward(const Batch & b) const
{
  require(b.rows >= 1 && b.horizon >= 1, "forward: empty batch");
  ForwardOutput out;
  const Tensor h = scenegraph::gat_layer(b.frames, encoder_gat);
  const Tensor seq = concat({reshape(h, {b.steps, b.rows, encoder_gat.out_features()}), b.observed}, 2);
  out.u0 = encoder.encode(seq).u0;
  if (!out.u0.all_finite()) {
    throw DivergenceError("encoder", "initial control is not finite");
  }
  const Tensor x0 = reshape(slice(b.observed, 0, b.steps - 1, b.steps), {b.rows, kD});
  out.horizon = control::decode_horizon(out.u0, x0, b.last_graph, decoder, dynamics, b.horizon);

  Tensor p = Tensor::zeros({b.rows, kD, kD});
  Tensor x = x0;
  out.covariance.reserve(b.horizon);
  for (std::size_t k = 0; k < b.horizon; ++k) {
    p = uncertainty::propagate_covariance(p, dynamics.transition_matrix(x), noise.matrices(out.horizon.applied[k]));
    out.covariance.push_back(p);
    x = out.horizon.states[k];
  }
  return out;
}

Tensor TrajectoryModel::loss(const ForwardOutput & out, const Batch & b, LossParts * parts) const
{
  const double s = config_.pos_scale;
  Tensor dist_sum;
  Tensor nll_sum;
  for (std::size_t k = 0; k < b.horizon; ++k) {
    const Tensor err = slice(b.future[k] - out.horizon.states[k], 1, 0, 2) * s;
    const Tensor d = sum(norm_last(err));
    const Tensor p_pos = uncertainty::position_block(out.covariance[k]) * (s * s);
    const Tensor n = sum(uncertainty::gaussian_nll_2d(err, p_pos));
    dist_sum = dist_sum.defined() ? dist_sum + d : d;
    nll_sum = nll_sum.defined() ? nll_sum + n : n;
  }
  const double count = static_cast<double>(b.horizon * b.rows);
  const Tensor ade = dist_sum * (1.0 / count);
  const Tensor anll = nll_sum * (1.0 / count);
  std::vector<Tensor> truth{reshape(slice(b.observed, 0, b.steps - 1, b.steps), {b.rows, kD})};
  truth.insert(truth.end(), b.future.begin(), b.future.end());
  const Tensor residual = dynamics.residual_loss(truth, out.horizon.applied);
  Tensor total = anll * config_.w_nll + ade * ade * config_.w_pos + residual * config_.w_dyn;
  if (!total.all_finite()) {
    throw DivergenceError("training", "loss is not finite");
  }
  if (parts != nullptr) {
    parts->total = total.item();
    parts->anll = anll.item();
    parts->ade = ade.item();
    parts->residual = residual.item();
  }
  return total;
}

std::vector<PredictionResult> TrajectoryModel::predict(const std::vector<data::GraphSequence> & samples) const
{
  const TrajectoryModel frozen = detached();
  std::vector<PredictionResult> out;
  out.reserve(samples.size());
  const double s = config_.pos_scale;
  const double v = config_.vel_scale;
  for (const auto & sample : samples) {
    const Batch b = make_batch({&sample}, config_);
    const ForwardOutput f = frozen.forward(b);
    PredictionResult r;
    for (std::size_t k = 0; k < b.horizon; ++k) {
      const Tensor & x = f.horizon.states[k];
      const Tensor & p = f.covariance[k];
      const Tensor & u = f.horizon.controls[k];
      std::vector<dynamics::AgentState> states(b.rows);
      std::vector<evaluation::Cov2> cov(b.rows);
      std::vector<std::vector<double>> ctrl(b.rows);
      for (std::size_t i = 0; i < b.rows; ++i) {
        states[i] = {
          x.at(i, 0) * s + b.center_x[i], x.at(i, 1) * s + b.center_y[i], x.at(i, 2) * v, x.at(i, 3) * v};
        cov[i] = {p.at(i, 0, 0) * s * s, p.at(i, 0, 1) * s * s, p.at(i, 1, 0) * s * s, p.at(i, 1, 1) * s * s};
        for (std::size_t j = 0; j < u.dim(1); ++j) {
          ctrl[i].push_back(u.at(i, j));
        }
      }
      r.states.push_back(std::move(states));
      r.covariance.push_back(std::move(cov));
      r.controls.push_back(std::move(ctrl));
    }
    out.push_back(std::move(r));
  }
  return out;
}

evaluation::ScenePrediction PredictionResult::as_scene_prediction() const
{
  evaluation::ScenePrediction p;
  const std::size_t n = states.empty() ? 0 : states.front().size();
  const bool with_cov = !covariance.empty();
  p.mean.assign(n, {});
  if (with_cov) {
    p.covariance.assign(n, {});
  }
  for (std::size_t k = 0; k < states.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      p.mean[i].push_back({states[k][i].x, states[k][i].y});
      if (with_cov) {
        p.covariance[i].push_back(covariance[k][i]);
      }
    }
  }
  return p;
}

std::vector<evaluation::Path> truth_paths(const data::GraphSequence & sample)
{
  std::vector<evaluation::Path> out(sample.num_agents());
  for (const auto & frame : sample.future) {
    for (std::size_t i = 0; i < frame.size(); ++i) {
      out[i].push_back({frame[i].x, frame[i].y});
    }
  }
  return out;
}

ParameterList TrajectoryModel::parameters() const
{
  ParameterList out;
  encoder_gat.collect("encoder.gat", out);
  encoder.collect("encoder.mamba", out);
  decoder.collect("decoder", out);
  dynamics.collect("dynamics", out);
  noise.collect("noise", out);
  return out;
}

TrajectoryModel TrajectoryModel::detached() const
{
  TrajectoryModel m = *this;
  m.encoder_gat = encoder_gat.detached();
  m.encoder = encoder.detached();
  m.decoder = decoder.detached();
  m.dynamics = dynamics.detached();
  m.noise = noise.detached();
  return m;
}

}  // namespace ssmtraj::training
