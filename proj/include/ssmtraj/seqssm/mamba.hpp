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

#ifndef SSMTRAJ_SEQSSM_MAMBA_HPP_
#define SSMTRAJ_SEQSSM_MAMBA_HPP_

#include "ssmtraj/numcore/layers.hpp"
#include "ssmtraj/numcore/rng.hpp"

#include <functional>
#include <string>

namespace ssmtraj::seqssm
{

using numcore::Tensor;

struct MambaOptions
{
  std::size_t state_expansion{10};  ///< N
  std::size_t conv_width{4};
  std::size_t block_expansion{4};  ///< E = block_expansion * D
  double dt_init{0.04};            ///< initial step size, seconds
  bool use_activation{true};       ///< SiLU after the convolution
  bool use_gate{true};             ///< multiply by SiLU(z)
};

/**
 * Selective SSM block on sequences laid out [T, R, D] (time, sequence,
 * channel). Pipeline:
 *
 *   [x', z] = x W_in                       (D -> 2E)
 *   x_c     = SiLU(causal_conv(x'))
 *   delta   = softplus(x_c W_dt + b_dt),  B = x_c W_B,  C = x_c W_C
 *   y       = scan(x_c; delta, A = -exp(A_log), B, C)
 *   out     = (y * SiLU(z)) W_out          (E -> D)
 *
 * There are no biases on the input and output projections, so a zero
 * sequence maps to zero through the gate.
 */
class MambaBlock
{
public:
  MambaBlock() = default;
  MambaBlock(std::size_t channels, const MambaOptions & options, numcore::Rng & rng);

  Tensor forward(const Tensor & x) const;

  void collect(const std::string & prefix, numcore::ParameterList & out) const;
  MambaBlock detached() const;

  std::size_t channels() const { return in_proj.dim(0); }
  std::size_t inner() const { return w_dt.dim(0); }
  std::size_t state() const { return a_log.dim(1); }

  Tensor in_proj;   ///< [D, 2E]
  Tensor conv_w;    ///< [E, K]
  Tensor conv_b;    ///< [E]
  Tensor w_dt;      ///< [E, E]
  Tensor b_dt;      ///< [E]
  Tensor w_b;       ///< [E, N]
  Tensor w_c;       ///< [E, N]
  Tensor a_log;     ///< [E, N]; A = -exp(a_log)
  Tensor out_proj;  ///< [E, D]
  bool use_activation{true};
  bool use_gate{true};
};

enum class MixMode
{
  ReverseTimesInput,    ///< combined = f + r * x
  ReverseTimesForward,  ///< combined = f + r * f
};

struct MixedMambaOptions
{
  MambaOptions block;
  MixMode mix{MixMode::ReverseTimesInput};
  bool mixed{true};  ///< false: forward block only
};

struct MixedOutputs
{
  Tensor forward;   ///< f, [T, R, D]
  Tensor reverse;   ///< r, time-aligned with x
  Tensor combined;  ///< f + r * (x or f)
  Tensor out;       ///< combined + final(combined), or f when not mixed
  Tensor u0;        ///< [R, du]
};

using SequenceMap = std::function<Tensor(const Tensor &)>;

/**
 * Forward, time-reversed and refining blocks around a per-channel product,
 * followed by a linear head on the last time step. The refining block is
 * applied as a residual so that a zero refining block leaves `combined`
 * unchanged.
 */
class MixedMamba
{
public:
  MixedMamba() = default;
  MixedMamba(
    std::size_t channels, std::size_t control_dim, const MixedMambaOptions & options,
    numcore::Rng & rng);

  MixedOutputs encode(const Tensor & x) const;

  void collect(const std::string & prefix, numcore::ParameterList & out) const;
  MixedMamba detached() const;

  MambaBlock forward_block;
  MambaBlock reverse_block;
  MambaBlock final_block;
  numcore::Linear head;
  MixMode mix{MixMode::ReverseTimesInput};
  bool mixed{true};
};

/// The mixing pipeline with arbitrary callables standing in for the blocks.
MixedOutputs mixed_mamba_encode_with(
  const Tensor & x, const SequenceMap & forward_block, const SequenceMap & reverse_block,
  const SequenceMap & final_block, const SequenceMap & head, MixMode mix, bool mixed = true);

}  // namespace ssmtraj::seqssm

#endif  // SSMTRAJ_SEQSSM_MAMBA_HPP_
