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

#include "ssmtraj/seqssm/mamba.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"
#include "ssmtraj/seqssm/scan.hpp"

#include <cmath>

namespace ssmtraj::seqssm
{

using namespace numcore;

MambaBlock::MambaBlock(std::size_t channels, const MambaOptions & options, Rng & rng)
: use_activation(options.use_activation), use_gate(options.use_gate)
{
  require(channels >= 1, "MambaBlock: channel count must be positive");
  require(options.state_expansion >= 1, "MambaBlock: state expansion must be positive");
  require(options.conv_width >= 1, "MambaBlock: conv width must be at least 1");
  require(options.block_expansion >= 1, "MambaBlock: block expansion must be positive");
  require(options.dt_init > 0.0, "MambaBlock: initial step must be positive");
  const std::size_t e = options.block_expansion * channels;
  const std::size_t n = options.state_expansion;
  const std::size_t k = options.conv_width;

  in_proj = glorot_uniform(channels, 2 * e, rng);
  std::vector<double> w(e * k);
  const double limit = 1.0 / std::sqrt(static_cast<double>(k));
  for (auto & v : w) {
    v = rng.uniform(-limit, limit);
  }
  conv_w = Tensor({e, k}, std::move(w), true);
  conv_b = Tensor::zeros({e}, true);
  w_dt = glorot_uniform(e, e, rng, 0.1);
  // softplus(b_dt) = dt_init
  b_dt = Tensor::full({e}, std::log(std::expm1(options.dt_init)), true);
  w_b = glorot_uniform(e, n, rng);
  w_c = glorot_uniform(e, n, rng);
  std::vector<double> al(e * n);
  for (std::size_t i = 0; i < e; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      al[i * n + j] = std::log(static_cast<double>(j + 1));
    }
  }
  a_log = Tensor({e, n}, std::move(al), true);
  out_proj = glorot_uniform(e, channels, rng);
}

Tensor MambaBlock::forward(const Tensor & x) const
{
  require(x.rank() == 3, "MambaBlock expects [T, R, D]");
  const std::size_t d = channels();
  if (x.dim(2) != d) {
    throw ContractViolation(
      "MambaBlock expects " + std::to_string(d) + " channels, got " + shape_to_string(x.shape()));
  }
  const std::size_t steps = x.dim(0);
  const std::size_t rows = x.dim(1);
  const std::size_t e = inner();
  const std::size_t n = state();

  Tensor xz = reshape(matmul(reshape(x, {steps * rows, d}), in_proj), {steps, rows, 2 * e});
  Tensor xc = causal_conv1d(slice(xz, 2, 0, e), conv_w, conv_b);
  if (use_activation) {
    xc = silu(xc);
  }
  Tensor flat = reshape(xc, {steps * rows, e});
  Tensor delta = reshape(softplus(matmul(flat, w_dt) + b_dt), {steps, rows, e});
  Tensor b = reshape(matmul(flat, w_b), {steps, rows, n});
  Tensor c = reshape(matmul(flat, w_c), {steps, rows, n});
  Tensor y = selective_scan_diagonal(xc, delta, -exp(a_log), b, c);
  if (use_gate) {
    y = y * silu(slice(xz, 2, e, 2 * e));
  }
  return reshape(matmul(reshape(y, {steps * rows, e}), out_proj), {steps, rows, d});
}

void MambaBlock::collect(const std::string & prefix, ParameterList & out) const
{
  out.push_back({prefix + ".in_proj", in_proj});
  out.push_back({prefix + ".conv_w", conv_w});
  out.push_back({prefix + ".conv_b", conv_b});
  out.push_back({prefix + ".w_dt", w_dt});
  out.push_back({prefix + ".b_dt", b_dt});
  out.push_back({prefix + ".w_b", w_b});
  out.push_back({prefix + ".w_c", w_c});
  out.push_back({prefix + ".a_log", a_log});
  out.push_back({prefix + ".out_proj", out_proj});
}

MambaBlock MambaBlock::detached() const
{
  MambaBlock m = *this;
  for (Tensor * t : {&m.in_proj, &m.conv_w, &m.conv_b, &m.w_dt, &m.b_dt, &m.w_b, &m.w_c, &m.a_log, &m.out_proj}) {
    *t = t->detach();
  }
  return m;
}

namespace
{

Tensor last_step(const Tensor & seq)
{
  const std::size_t steps = seq.dim(0);
  return reshape(slice(seq, 0, steps - 1, steps), {seq.dim(1), seq.dim(2)});
}

}  // namespace

MixedOutputs mixed_mamba_encode_with(
  const Tensor & x, const SequenceMap & forward_block, const SequenceMap & reverse_block,
  const SequenceMap & final_block, const SequenceMap & head, MixMode mix, bool mixed)
{
  require(x.rank() == 3 && x.dim(0) >= 1, "mixed Mamba expects a non-empty [T, R, D] sequence");
  MixedOutputs o;
  o.forward = forward_block(x);
  require(o.forward.shape() == x.shape(), "mixed Mamba: forward block changed the shape");
  if (!mixed) {
    o.combined = o.forward;
    o.out = o.forward;
  } else {
    o.reverse = flip(reverse_block(flip(x, 0)), 0);
    require(o.reverse.shape() == x.shape(), "mixed Mamba: reverse block changed the shape");
    o.combined = o.forward + o.reverse * (mix == MixMode::ReverseTimesInput ? x : o.forward);
    o.out = o.combined + final_block(o.combined);
  }
  o.u0 = head(last_step(o.out));
  return o;
}

MixedMamba::MixedMamba(
  std::size_t channels, std::size_t control_dim, const MixedMambaOptions & options, Rng & rng)
: forward_block(channels, options.block, rng),
  reverse_block(channels, options.block, rng),
  final_block(channels, options.block, rng),
  head(channels, control_dim, true, rng),
  mix(options.mix),
  mixed(options.mixed)
{
}

MixedOutputs MixedMamba::encode(const Tensor & x) const
{
  auto block = [](const MambaBlock & b) { return [&b](const Tensor & t) { return b.forward(t); }; };
  return mixed_mamba_encode_with(
    x, block(forward_block), block(reverse_block), block(final_block),
    [this](const Tensor & t) { return head.forward(t); }, mix, mixed);
}

void MixedMamba::collect(const std::string & prefix, ParameterList & out) const
{
  forward_block.collect(prefix + ".forward", out);
  if (mixed) {
    reverse_block.collect(prefix + ".reverse", out);
    final_block.collect(prefix + ".final", out);
  }
  head.collect(prefix + ".head", out);
}

MixedMamba MixedMamba::detached() const
{
  MixedMamba m = *this;
  m.forward_block = forward_block.detached();
  m.reverse_block = reverse_block.detached();
  m.final_block = final_block.detached();
  m.head = head.detached();
  return m;
}

}  // namespace ssmtraj::seqssm
