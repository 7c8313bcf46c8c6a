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


#ifndef SSMTRAJ_TRAINING_MODEL_HPP_
#define SSMTRAJ_TRAINING_MODEL_HPP_

#include "ssmtraj/control/decoder.hpp"
#include "ssmtraj/data/scene.hpp"
#include "ssmtraj/dynamics/model.hpp"
#include "ssmtraj/evaluation/metrics.hpp"
#include "ssmtraj/scenegraph/gat.hpp"
#include "ssmtraj/seqssm/mamba.hpp"
#include "ssmtraj/training/config.hpp"
#include "ssmtraj/uncertainty/ekf.hpp"

#include <vector>

namespace ssmtraj::training
{

using numcore::Tensor;

/**
 * Disjoint union of samples with equal window lengths, in normalized units:
 * positions centred on each sample's last observed centroid and divided by
 * pos_scale, velocities divided by vel_scale. Rows are agents, sample by
 * sample.
 */
struct Batch
{
  std::vector<const data::GraphSequence *> samples;
  std::vector<std::size_t> offsets;  ///< first row of each sample
  std::size_t rows{0};
  std::size_t steps{0};
  std::size_t horizon{0};
  Tensor observed;                   ///< [T, R, 4]
  std::vector<Tensor> future;        ///< horizon x [R, 4]
  scenegraph::SceneGraph frames;     ///< every observed frame, node t * R + r
  scenegraph::SceneGraph last_graph; ///< last observed frame
  std::vector<double> center_x;      ///< per row
  std::vector<double> center_y;
};

Batch make_batch(const std::vector<const data::GraphSequence *> & samples, const ModelConfig & config);

/// Forward pass result in normalized units.
struct ForwardOutput
{
  Tensor u0;                        ///< [R, du]
  control::Horizon horizon;         ///< states x_1..x_H, controls, applied controls
  std::vector<Tensor> covariance;   ///< P_1..P_H, [R, 4, 4]
};

struct LossParts
{
  double total{0.0};
  double anll{0.0};
  double ade{0.0};
  double residual{0.0};
};

/// Physical-unit prediction for one sample.
struct PredictionResult
{
  std::vector<std::vector<dynamics::AgentState>> states;  ///< [H][n]
  std::vector<std::vector<evaluation::Cov2>> covariance;  ///< [H][n], position block, m^2
  std::vector<std::vector<std::vector<double>>> controls; ///< [H][n][du]

  evaluation::ScenePrediction as_scene_prediction() const;
};

/// Future positions of a sample by agent, as the metrics expect them.
std::vector<evaluation::Path> truth_paths(const data::GraphSequence & sample);

/**
 * Encoder (one attention layer per observed frame, then mixed or single
 * Mamba down to u_0), control decoder, dynamics and EKF covariance head.
 * Every component draws its initial weights from its own stream of the
 * config seed, so the switches do not perturb the other components.
 */
class TrajectoryModel
{
public:
  TrajectoryModel() = default;
  explicit TrajectoryModel(const ModelConfig & config);

  const ModelConfig & config() const { return config_; }

  ForwardOutput forward(const Batch & batch) const;
  /// w_nll ANLL + w_pos ADE^2 + w_dyn residual, ANLL and ADE in meters.
  Tensor loss(const ForwardOutput & out, const Batch & batch, LossParts * parts = nullptr) const;

  /// Tape-free prediction of each sample.
  std::vector<PredictionResult> predict(const std::vector<data::GraphSequence> & samples) const;

  /// Ordered parameter handles; the checkpoint layout.
  numcore::ParameterList parameters() const;
  TrajectoryModel detached() const;

  scenegraph::GatParams encoder_gat;
  seqssm::MixedMamba encoder;
  control::ControlDecoder decoder;
  dynamics::DynamicsModel dynamics;
  uncertainty::ProcessNoiseHead noise;

private:
  ModelConfig config_;
};

}  // namespace ssmtraj::training

#endif  // SSMTRAJ_TRAINING_MODEL_HPP_
