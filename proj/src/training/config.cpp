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


#include "ssmtraj/training/config.hpp"

#include "ssmtraj/numcore/errors.hpp"

#include <array>
#include <cmath>

namespace ssmtraj::training
{

namespace
{

struct Row
{
  const char * name;
  bool mixed;
  bool graph;
  bool linear;
};

constexpr std::array<Row, 8> kRows{{
  {"H1", true, false, true},
  {"H2", false, true, true},
  {"H3", true, false, false},
  {"H4", false, true, false},
  {"H5", false, false, true},
  {"H6", true, true, false},
  {"H7", false, false, false},
  {"H8", true, true, true},
}};

}  // namespace

ModelConfig ModelConfig::ablation(const std::string & row) { return ablation(row, ModelConfig{}); }

ModelConfig ModelConfig::ablation(const std::string & row, ModelConfig base)
{
  for (const auto & r : kRows) {
    if (row == r.name) {
      base.mixed_mamba = r.mixed;
      base.graph_considered = r.graph;
      base.linear_koopman = r.linear;
      return base;
    }
  }
  throw ContractViolation("unknown ablation '" + row + "' (expected H1..H8)");
}

std::string ModelConfig::ablation_name() const
{
  for (const auto & r : kRows) {
    if (r.mixed == mixed_mamba && r.graph == graph_considered && r.linear == linear_koopman) {
      return r.name;
    }
  }
  return "";
}

void ModelConfig::validate() const
{
  require(mamba_state >= 1 && mamba_conv >= 1 && mamba_expansion >= 1, "config: Mamba sizes must be positive");
  require(gat_heads >= 1 && gat_att_dim >= 1 && gat_head_dim >= 1, "config: GAT sizes must be positive");
  require(control_dim >= 1, "config: control_dim must be positive");
  require(linear_koopman || koopman_features >= 1, "config: the lifted model needs features");
  require(dt > 0.0 && std::isfinite(dt), "config: dt must be positive");
  require(decoder_hidden >= 1 && decoder_state_features >= 1, "config: decoder sizes must be positive");
  require(q_init > 0.0 && std::isfinite(q_init), "config: q_init must be positive");
  require(w_nll >= 0.0 && w_pos >= 0.0 && w_dyn >= 0.0, "config: loss weights must be non-negative");
  require(learning_rate >= 0.0, "config: learning_rate must be non-negative");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "config: betas must lie in [0, 1)");
  require(clip_norm > 0.0, "config: clip_norm must be positive");
  require(epochs >= 1, "config: epochs must be at least 1");
  require(batch_size >= 1, "config: batch_size must be at least 1");
  require(pos_scale > 0.0 && vel_scale > 0.0, "config: scales must be positive");
  require(radius > 0.0, "config: radius must be positive");
}

}  // namespace ssmtraj::training
