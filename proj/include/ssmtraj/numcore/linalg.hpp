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

#ifndef SSMTRAJ_NUMCORE_LINALG_HPP_
#define SSMTRAJ_NUMCORE_LINALG_HPP_

#include "ssmtraj/numcore/tensor.hpp"

#include <vector>

namespace ssmtraj::numcore
{

/**
 * Matrix exponential by scaling and squaring of a degree-18 Taylor
 * polynomial. Built from recorded operations, so the gradient is exact for the
 * computed approximation.
 */
Tensor matexp(const Tensor & m);

struct CholeskyResult
{
  Tensor factor;  ///< lower triangular L with L * L^T = P + jitter * I
  double log_determinant{0.0};
  double jitter{0.0};
};

/// Jitter ladder used when P is not numerically positive definite.
inline constexpr double kJitterStart = 1e-9;
inline constexpr double kJitterMax = 1e-5;
inline constexpr double kSymmetryTolerance = 1e-9;

/**
 * Cholesky factor and log-determinant of a symmetric matrix. Tries P itself,
 * then P + j*I for j = 1e-9, 1e-8, ..., 1e-5; throws DecompositionError when
 * every rung fails. Not differentiable.
 */
CholeskyResult cholesky_logdet(const Tensor & p);

/// Solves L * L^T * x = b given the factor from cholesky_logdet.
std::vector<double> cholesky_solve(const Tensor & factor, const std::vector<double> & b);

/// Eigenvalues of a symmetric matrix in ascending order.
std::vector<double> symmetric_eigenvalues(const Tensor & p);

/// Largest |P_ij - P_ji|.
double asymmetry(const Tensor & p);

}  // namespace ssmtraj::numcore

#endif  // SSMTRAJ_NUMCORE_LINALG_HPP_
