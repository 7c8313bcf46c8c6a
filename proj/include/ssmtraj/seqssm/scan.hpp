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

#ifndef SSMTRAJ_SEQSSM_SCAN_HPP_
#define SSMTRAJ_SEQSSM_SCAN_HPP_

#include "ssmtraj/numcore/tensor.hpp"

namespace ssmtraj::seqssm
{

using numcore::Tensor;

/**
 * h_t = A_t h_{t-1} + B_t x_t with h_0 = 0, y_t = C_t h_t.
 *
 * x is [T, M], a_bar [T, N, N], b_bar [T, N, M], c [T, P, N]; returns y [T, P].
 * Reference path built from recorded operations.
 */
Tensor selective_scan(const Tensor & x, const Tensor & a_bar, const Tensor & b_bar, const Tensor & c);
/// Hidden states h_1..h_T as [T, N].
Tensor selective_scan_states(const Tensor & x, const Tensor & a_bar, const Tensor & b_bar);

/**
 * Batched selective scan with a diagonal state matrix per channel, as used
 * inside the Mamba block. For every sequence r and channel e:
 *
 *   h_t[n] = exp(d_t a[e,n]) h_{t-1}[n] + zoh_gain(d_t, a[e,n]) B_t[n] u_t
 *   y_t    = sum_n C_t[n] h_t[n]
 *
 * Shapes: u, delta [T, R, E]; a [E, N]; b, c [T, R, N]. Returns y [T, R, E].
 * Single fused operation with a hand-written backward pass.
 */
Tensor selective_scan_diagonal(
  const Tensor & u, const Tensor & delta, const Tensor & a, const Tensor & b, const Tensor & c);

/**
 * Depthwise causal convolution along time: y_t[e] = bias[e] +
 * sum_k w[e,k] x_{t-K+1+k}[e], zero-padded on the left. x is [T, R, E],
 * w [E, K], bias [E].
 */
Tensor causal_conv1d(const Tensor & x, const Tensor & w, const Tensor & bias);

}  // namespace ssmtraj::seqssm

#endif  // SSMTRAJ_SEQSSM_SCAN_HPP_
