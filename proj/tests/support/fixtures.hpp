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

// Small synthetic samples and model sizes shared by the training tests.

#ifndef SSMTRAJ_TESTS_FIXTURES_HPP_
#define SSMTRAJ_TESTS_FIXTURES_HPP_

#include "ssmtraj/data/synth.hpp"
#include "ssmtraj/data/windows.hpp"
#include "ssmtraj/training/config.hpp"

#include <vector>

namespace ssmtraj::testing
{

/// One window per scene, dt = 0.2 s.
inline std::vector<data::GraphSequence> highway_windows(
  std::size_t scenes, std::size_t agents, std::size_t observed, std::size_t horizon, std::uint64_t seed,
  double noise = 0.0)
{
  data::SynthOptions so;
  so.kind = data::SynthKind::Highway;
  so.scenes = scenes;
  so.agents = agents;
  so.seed = seed;
  so.noise_std = noise;
  so.frames = (observed + horizon) * 5;
  data::WindowOptions wo;
  wo.observed = observed;
  wo.horizon = horizon;
  wo.downsample = 5;
  wo.stride = so.frames;
  return data::make_windows(data::synth_generate(so), wo);
}

/// Every width shrunk so finite differences over all weights stay cheap.
inline training::ModelConfig tiny_config(const std::string & row = "H8")
{
  training::ModelConfig c = training::ModelConfig::ablation(row);
  c.mamba_state = 2;
  c.mamba_conv = 2;
  c.mamba_expansion = 1;
  c.gat_heads = 1;
  c.gat_att_dim = 2;
  c.gat_head_dim = 2;
  c.control_dim = 2;
  c.koopman_hidden = 3;
  c.koopman_layers = 1;
  c.koopman_features = 2;
  c.decoder_hidden = 3;
  c.decoder_state_features = 2;
  c.batch_size = 4;
  return c;
}

}  // namespace ssmtraj::testing

#endif  // SSMTRAJ_TESTS_FIXTURES_HPP_
