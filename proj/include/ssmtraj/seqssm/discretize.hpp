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

#ifndef SSMTRAJ_SEQSSM_DISCRETIZE_HPP_
#define SSMTRAJ_SEQSSM_DISCRETIZE_HPP_

#include "ssmtraj/numcore/tensor.hpp"

namespace ssmtraj::seqssm
{

using numcore::Tensor;

struct Discretized
{
  Tensor a_bar;  ///< [N, N]
  Tensor b_bar;  ///< [N, M]
};

/**
 * Zero-order hold: A_bar = exp(dA), B_bar = (dA)^-1 (exp(dA) - I) d B.
 *
 * Both blocks come out of one exponential of the augmented matrix
 * [[dA, dB], [0, 0]], which stays well defined when A is singular, so no
 * separate small-argument branch is needed. Differentiable in A and B.
 */
Discretized zoh_discretize(const Tensor & a, const Tensor & b, double delta);

/**
 * Diagonal case, elementwise: A_bar = e^{d a}, B_bar_ij = ((e^{d a_i} - 1) / a_i) b_ij.
 * `a` is [N], `b` is [N, M].
 */
Discretized zoh_discretize_diagonal(const Tensor & a, const Tensor & b, double delta);

/// (e^{d a} - 1) / a, with the limit d at a = 0.
double zoh_gain(double delta, double a);
/// d/d(delta) and d/d(a) of zoh_gain.
double zoh_gain_ddelta(double delta, double a);
double zoh_gain_da(double delta, double a);
/// zoh_gain_da given the already evaluated exp(delta a) and zoh_gain.
double zoh_gain_da_from(double delta, double a, double decay, double gain);

}  // namespace ssmtraj::seqssm

#endif  // SSMTRAJ_SEQSSM_DISCRETIZE_HPP_
