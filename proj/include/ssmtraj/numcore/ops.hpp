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

#ifndef SSMTRAJ_NUMCORE_OPS_HPP_
#define SSMTRAJ_NUMCORE_OPS_HPP_

#include "ssmtraj/numcore/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ssmtraj::numcore
{

// Elementwise arithmetic with numpy-style broadcasting (shapes aligned on the
// trailing axis, extent 1 broadcasts).
Tensor operator+(const Tensor & a, const Tensor & b);
Tensor operator-(const Tensor & a, const Tensor & b);
Tensor operator*(const Tensor & a, const Tensor & b);
Tensor operator/(const Tensor & a, const Tensor & b);
Tensor operator-(const Tensor & a);

Tensor operator+(const Tensor & a, double s);
Tensor operator+(double s, const Tensor & a);
Tensor operator-(const Tensor & a, double s);
Tensor operator-(double s, const Tensor & a);
Tensor operator*(const Tensor & a, double s);
Tensor operator*(double s, const Tensor & a);
Tensor operator/(const Tensor & a, double s);

Tensor exp(const Tensor & a);
Tensor log(const Tensor & a);
Tensor tanh(const Tensor & a);
Tensor sigmoid(const Tensor & a);
/// x * sigmoid(x).
Tensor silu(const Tensor & a);
/// log(1 + e^x), evaluated stably.
Tensor softplus(const Tensor & a);
Tensor leaky_relu(const Tensor & a, double negative_slope);
Tensor square(const Tensor & a);
Tensor sqrt(const Tensor & a);

/// [m,k] x [k,n] -> [m,n].
Tensor matmul(const Tensor & a, const Tensor & b);
/// [B,m,k] x [B,k,n] -> [B,m,n].
Tensor bmm(const Tensor & a, const Tensor & b);
/// Swaps the two axes of a matrix.
Tensor transpose(const Tensor & a);
/// Swaps the last two axes of a rank-3 tensor.
Tensor transpose_last2(const Tensor & a);

Tensor reshape(const Tensor & a, Shape shape);

/// Sum of all elements, shape [1].
Tensor sum(const Tensor & a);
/// Sum along one axis; the axis is removed (a rank-1 input yields shape [1]).
Tensor sum(const Tensor & a, std::size_t axis);
Tensor mean(const Tensor & a);
Tensor mean(const Tensor & a, std::size_t axis);

/// Softmax over the last axis.
Tensor softmax(const Tensor & a);
/**
 * Softmax of `scores` ([E] or [E,H]) over rows sharing a segment id, each
 * column independently. Rows of an empty segment are impossible by
 * construction; segments without rows are skipped.
 */
Tensor segment_softmax(
  const Tensor & scores, const std::vector<std::uint32_t> & segment, std::size_t num_segments);

Tensor concat(const std::vector<Tensor> & parts, std::size_t axis);
/// Stacks equal-shaped tensors along a new leading axis.
Tensor stack(const std::vector<Tensor> & parts);
/// Half-open range [begin, end) along `axis`.
Tensor slice(const Tensor & a, std::size_t axis, std::size_t begin, std::size_t end);
Tensor index_select(const Tensor & a, std::size_t axis, const std::vector<std::uint32_t> & index);
/// out[index[i]] += a[i] along axis 0; out has `rows` leading entries.
Tensor index_add(const Tensor & a, const std::vector<std::uint32_t> & index, std::size_t rows);
Tensor flip(const Tensor & a, std::size_t axis);

/**
 * L2 norm over the last axis. The gradient at an exactly-zero vector is taken
 * as zero (the subgradient of minimal norm).
 */
Tensor norm_last(const Tensor & a);

}  // namespace ssmtraj::numcore

#endif  // SSMTRAJ_NUMCORE_OPS_HPP_
