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


#ifndef SSMTRAJ_UNCERTAINTY_EKF_HPP_
#define SSMTRAJ_UNCERTAINTY_EKF_HPP_

#include "ssmtraj/dynamics/model.hpp"
#include "ssmtraj/numcore/layers.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ssmtraj::uncertainty
{

using numcore::Tensor;

/// One-step transition acting row-wise on [R, d] states.
using Transition = std::function<Tensor(const Tensor &)>;

/**
 * d psi / d x at x ([d] or [1, d]), one reverse sweep per output row.
 * Tracked tensors captured by psi receive gradient contributions, so
 * closures should capture untracked parameters. Throws DivergenceError on a
 * non-finite entry.
 */
Tensor jacobian(const Transition & psi, const Tensor & x);

/**
 * Jacobians of a row-wise transition at every row of x [R, d] -> [R, m, d].
 * Uses one sweep per output coordinate over the summed rows, which is exact
 * because row r of psi(x) depends on row r of x only.
 */
Tensor batch_jacobian(const Transition & psi, const Tensor & x);

/// Jacobian of the Euler step x -> x + dt x'(x, u) at fixed u, [R, d, d].
Tensor transition_jacobian(const dynamics::DynamicsModel & model, const Tensor & x, const Tensor & u);

inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kQFloor = 1e-6;

struct BeliefState
{
  Tensor mean;        ///< [d]
  Tensor covariance;  ///< [d, d]
  Tensor noise;       ///< [d, d] diagonal
};

/// Zero covariance at the start of the horizon.
BeliefState initial_belief(const Tensor & mean, const Tensor & noise);

/// Throws ContractViolation on asymmetry, a negative eigenvalue or a non-diagonal Q.
void validate(const BeliefState & belief);

/**
 * F P F^T + Q, symmetrized. Accepts single matrices [d, d] or batches
 * [R, d, d] and records on the tape. Throws DivergenceError when the
 * smallest eigenvalue of any result is below -kPsdTolerance.
 */
Tensor propagate_covariance(const Tensor & p, const Tensor & f, const Tensor & q);

/// Prediction step with the next mean supplied by the caller.
BeliefState ekf_predict(const BeliefState & belief, const Tensor & f, const Tensor & next_mean);
/// Prediction step through psi; F is its Jacobian at the current mean.
BeliefState ekf_predict(const BeliefState & belief, const Transition & psi);

/// Q_ii = softplus(z_i) + q_floor with z an affine map of decoder features.
class ProcessNoiseHead
{
public:
  ProcessNoiseHead() = default;
  ProcessNoiseHead(std::size_t features, std::size_t state_dim, numcore::Rng & rng, double q_floor = kQFloor);
  /// As above with the bias set so that a zero input yields q_floor + q_init on the diagonal.
  ProcessNoiseHead(
    std::size_t features, std::size_t state_dim, numcore::Rng & rng, double q_floor, double q_init);
  ProcessNoiseHead(numcore::Linear map, double q_floor = kQFloor);

  /// [R, F] -> diagonal entries [R, d].
  Tensor diagonal(const Tensor & features) const;
  /// [R, F] -> diagonal matrices [R, d, d].
  Tensor matrices(const Tensor & features) const;

  double q_floor() const { return q_floor_; }
  void collect(const std::string & prefix, numcore::ParameterList & out) const;
  ProcessNoiseHead detached() const;

private:
  numcore::Linear map_;
  double q_floor_{kQFloor};
};

/// rows of diagonal entries [R, d] -> [R, d, d]
Tensor diag_embed(const Tensor & diagonal);

/// Leading 2x2 block of every covariance in [R, d, d].
Tensor position_block(const Tensor & p);

/**
 * 1/2 [(x - m)^T P^-1 (x - m) + log det P + k log 2 pi] for a k-dimensional
 * Gaussian, through a jittered Cholesky factorization. Not differentiable.
 */
double gaussian_nll(const std::vector<double> & x_true, const std::vector<double> & mean, const Tensor & p);

/**
 * Per-row 2-D negative log-likelihood of errors e [R, 2] under covariances
 * p [R, 2, 2], recorded on the tape. Throws DecompositionError when a block
 * is not positive definite.
 */
Tensor gaussian_nll_2d(const Tensor & error, const Tensor & p);

}  // namespace ssmtraj::uncertainty

#endif  // SSMTRAJ_UNCERTAINTY_EKF_HPP_
