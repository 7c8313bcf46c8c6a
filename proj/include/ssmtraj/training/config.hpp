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


#ifndef SSMTRAJ_TRAINING_CONFIG_HPP_
#define SSMTRAJ_TRAINING_CONFIG_HPP_

#include <cstdint>
#include <string>

namespace ssmtraj::training
{

/**
 * Everything needed to rebuild a model and its training run. The three
 * switches are the ablation axes; ModelConfig::ablation() maps the row names
 * H1..H8 onto them.
 */
struct ModelConfig
{
  bool mixed_mamba{true};
  bool graph_considered{true};
  /// linear dynamics in the physical state; false lifts through learned features
  bool linear_koopman{true};

  std::size_t mamba_state{10};
  std::size_t mamba_conv{4};
  std::size_t mamba_expansion{4};

  std::size_t gat_heads{3};
  std::size_t gat_att_dim{8};
  std::size_t gat_head_dim{8};

  std::size_t control_dim{4};
  std::size_t koopman_hidden{32};
  std::size_t koopman_layers{2};
  std::size_t koopman_features{12};
  /// prediction step, seconds; must match the data
  double dt{0.2};

  /// initial process-noise variance per step, normalized units
  double q_init{1e-4};

  std::size_t decoder_hidden{64};
  std::size_t decoder_state_features{16};

  double w_nll{1.0};
  double w_pos{1.0};
  double w_dyn{0.1};

  double learning_rate{1e-3};
  double beta1{0.9};
  double beta2{0.999};
  double weight_decay{0.0};
  double clip_norm{1.0};
  std::size_t epochs{200};
  std::size_t batch_size{16};
  std::uint64_t seed{0};

  /// positions are centred per sample and divided by this, meters
  double pos_scale{10.0};
  /// velocities are divided by this, m/s
  double vel_scale{10.0};
  double radius{30.0};

  /// H1..H8; throws ContractViolation on other names.
  static ModelConfig ablation(const std::string & row);
  /// `base` with its switches set for `row`.
  static ModelConfig ablation(const std::string & row, ModelConfig base);
  /// The row name matching the three switches.
  std::string ablation_name() const;
  /// Throws ContractViolation on inconsistent values.
  void validate() const;
};

}  // namespace ssmtraj::training

#endif  // SSMTRAJ_TRAINING_CONFIG_HPP_
