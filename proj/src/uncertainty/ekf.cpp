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


#include "ssmtraj/uncertainty/ekf.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/linalg.hpp"
#include "ssmtraj/numcore/ops.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace ssmtraj::uncertainty
{

using namespace numcore;

namespace
{

void check_finite(const std::vector<double> & v, const char * what)
{
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw DivergenceError("uncertainty", what);
    }
  }
}

double min_eigenvalue(std::span<const double> m, std::size_t d)
{
  Eigen::MatrixXd a(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      a(i, j) = m[i * d + j];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

Tensor jacobian(const Transition & psi, const Tensor & x)
{
  require(grad_enabled(), "jacobian: gradients are disabled");
  require(x.rank() == 1 || (x.rank() == 2 && x.dim(0) == 1), "jacobian: x must be [d] or [1, d]");
  const std::size_t d = x.numel();
  Tensor leaf({1, d}, std::vector<double>(x.values().begin(), x.values().end()), true);
  const Tensor y = psi(leaf);
  require(y.rank() == 2 && y.dim(0) == 1, "jacobian: psi must map [1, d] to [1, m]");
  const std::size_t m = y.dim(1);
  std::vector<double> f(m * d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    leaf.zero_grad();
    backward(slice(y, 1, i, i + 1));
    const auto g = leaf.grad();
    std::copy(g.begin(), g.end(), f.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  check_finite(f, "jacobian has a non-finite entry");
  return Tensor({m, d}, std::move(f));
}

Tensor batch_jacobian(const Transition & psi, const Tensor & x)
{
  require(grad_enabled(), "batch_jacobian: gradients are disabled");
  require(x.rank() == 2, "batch_jacobian: x must be [R, d]");
  const std::size_t rows = x.dim(0);
  const std::size_t d = x.dim(1);
  Tensor leaf({rows, d}, std::vector<double>(x.values().begin(), x.values().end()), true);
  const Tensor y = psi(leaf);
  require(y.rank() == 2 && y.dim(0) == rows, "batch_jacobian: psi must map [R, d] to [R, m]");
  const std::size_t m = y.dim(1);
  std::vector<double> f(rows * m * d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    leaf.zero_grad();
    backward(sum(slice(y, 1, i, i + 1)));
    const auto g = leaf.grad();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < d; ++j) {
        f[(r * m + i) * d + j] = g[r * d + j];
      }
    }
  }
  check_finite(f, "jacobian has a non-finite entry");
  return Tensor({rows, m, d}, std::move(f));
}

Tensor transition_jacobian(const dynamics::DynamicsModel & model, const Tensor & x, const Tensor & u)
{
  const auto frozen = model.detached();
  const Tensor uc = u.detach();
  return batch_jacobian([&](const Tensor & s) { return frozen.euler_step(s, uc); }, x);
}

BeliefState initial_belief(const Tensor & mean, const Tensor & noise)
{
  require(mean.rank() == 1, "initial_belief: mean must be [d]");
  const std::size_t d = mean.dim(0);
  BeliefState b{mean, Tensor::zeros({d, d}), noise};
  validate(b);
  return b;
}

void validate(const BeliefState & b)
{
  require(b.mean.rank() == 1, "belief: mean must be [d]");
  const std::size_t d = b.mean.dim(0);
  require(
    b.covariance.rank() == 2 && b.covariance.dim(0) == d && b.covariance.dim(1) == d,
    "belief: covariance must be [d, d]");
  require(b.noise.rank() == 2 && b.noise.dim(0) == d && b.noise.dim(1) == d, "belief: noise must be [d, d]");
  require(asymmetry(b.covariance) <= kSymmetryTolerance, "belief: covariance is not symmetric");
  require(min_eigenvalue(b.covariance.values(), d) >= -kPsdTolerance, "belief: covariance is not PSD");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double q = b.noise.at(i, j);
      require(i == j ? q >= 0.0 : q == 0.0, "belief: noise must be diagonal and non-negative");
    }
  }
}

Tensor propagate_covariance(const Tensor & p, const Tensor & f, const Tensor & q)
{
  require(p.shape() == f.shape(), "propagate_covariance: P and F shapes differ");
  require(p.rank() == 2 || p.rank() == 3, "propagate_covariance: expected [d, d] or [R, d, d]");
  Tensor next;
  if (p.rank() == 2) {
    next = matmul(matmul(f, p), transpose(f)) + q;
    next = (next + transpose(next)) * 0.5;
  } else {
    next = bmm(bmm(f, p), transpose_last2(f)) + q;
    next = (next + transpose_last2(next)) * 0.5;
  }
  const std::size_t d = p.dim(p.rank() - 1);
  const auto v = next.values();
  for (std::size_t k = 0; k < v.size(); k += d * d) {
    if (!(min_eigenvalue(v.subspan(k, d * d), d) >= -kPsdTolerance)) {
      throw DivergenceError("uncertainty", "propagated covariance is not positive semi-definite");
    }
  }
  return next;
}

BeliefState ekf_predict(const BeliefState & belief, const Tensor & f, const Tensor & next_mean)
{
  require(next_mean.shape() == belief.mean.shape(), "ekf_predict: mean shape changed");
  return {next_mean, propagate_covariance(belief.covariance, f, belief.noise), belief.noise};
}

BeliefState ekf_predict(const BeliefState & belief, const Transition & psi)
{
  const std::size_t d = belief.mean.dim(0);
  const Tensor f = jacobian(psi, belief.mean);
  Tensor next;
  {
    NoGradGuard guard;
    next = reshape(psi(reshape(belief.mean, {1, d})), {d});
  }
  return ekf_predict(belief, f, next);
}

ProcessNoiseHead::ProcessNoiseHead(std::size_t features, std::size_t state_dim, Rng & rng, double q_floor)
: map_(features, state_dim, true, rng, 0.1), q_floor_(q_floor)
{
}

ProcessNoiseHead::ProcessNoiseHead(
  std::size_t features, std::size_t state_dim, Rng & rng, double q_floor, double q_init)
: ProcessNoiseHead(features, state_dim, rng, q_floor)
{
  require(q_init > 0.0, "ProcessNoiseHead: initial noise must be positive");
  // inverse softplus
  const double b = q_init > 30.0 ? q_init : std::log(std::expm1(q_init));
  map_ = Linear(map_.weight(), Tensor::full({state_dim}, b, true));
}

ProcessNoiseHead::ProcessNoiseHead(Linear map, double q_floor) : map_(std::move(map)), q_floor_(q_floor) {}

Tensor ProcessNoiseHead::diagonal(const Tensor & features) const
{
  return softplus(map_.forward(features)) + q_floor_;
}

Tensor ProcessNoiseHead::matrices(const Tensor & features) const { return diag_embed(diagonal(features)); }

void ProcessNoiseHead::collect(const std::string & prefix, ParameterList & out) const
{
  map_.collect(prefix, out);
}

ProcessNoiseHead ProcessNoiseHead::detached() const { return ProcessNoiseHead(map_.detached(), q_floor_); }

Tensor diag_embed(const Tensor & diagonal)
{
  require(diagonal.rank() == 2, "diag_embed: expected [R, d]");
  const std::size_t rows = diagonal.dim(0);
  const std::size_t d = diagonal.dim(1);
  return reshape(diagonal, {rows, 1, d}) * reshape(Tensor::eye(d), {1, d, d});
}

Tensor position_block(const Tensor & p)
{
  require(p.rank() == 3 && p.dim(1) >= 2 && p.dim(2) >= 2, "position_block: expected [R, d, d]");
  return slice(slice(p, 1, 0, 2), 2, 0, 2);
}

double gaussian_nll(const std::vector<double> & x_true, const std::vector<double> & mean, const Tensor & p)
{
  const std::size_t k = x_true.size();
  require(mean.size() == k, "gaussian_nll: mean and truth differ in size");
  require(p.rank() == 2 && p.dim(0) == k && p.dim(1) == k, "gaussian_nll: covariance must be [k, k]");
  const auto chol = cholesky_logdet(p);
  std::vector<double> e(k);
  for (std::size_t i = 0; i < k; ++i) {
    e[i] = x_true[i] - mean[i];
  }
  const auto solved = cholesky_solve(chol.factor, e);
  double quad = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    quad += e[i] * solved[i];
  }
  return 0.5 * (quad + chol.log_determinant + static_cast<double>(k) * std::log(2.0 * std::numbers::pi));
}

Tensor gaussian_nll_2d(const Tensor & error, const Tensor & p)
{
  require(error.rank() == 2 && error.dim(1) == 2, "gaussian_nll_2d: error must be [R, 2]");
  require(
    p.rank() == 3 && p.dim(0) == error.dim(0) && p.dim(1) == 2 && p.dim(2) == 2,
    "gaussian_nll_2d: covariance must be [R, 2, 2]");
  const std::size_t rows = error.dim(0);
  const Tensor flat = reshape(p, {rows, 4});
  const Tensor a = slice(flat, 1, 0, 1);
  const Tensor b = (slice(flat, 1, 1, 2) + slice(flat, 1, 2, 3)) * 0.5;
  const Tensor d = slice(flat, 1, 3, 4);
  const Tensor det = a * d - b * b;
  const auto dv = det.values();
  const auto av = a.values();
  for (std::size_t r = 0; r < rows; ++r) {
    if (!(av[r] > 0.0 && dv[r] > 0.0)) {
      throw DecompositionError("position covariance is not positive definite");
    }
  }
  const Tensor e0 = slice(error, 1, 0, 1);
  const Tensor e1 = slice(error, 1, 1, 2);
  const Tensor quad = (d * e0 * e0 - 2.0 * b * e0 * e1 + a * e1 * e1) / det;
  const Tensor nll = (quad + log(det) + 2.0 * std::log(2.0 * std::numbers::pi)) * 0.5;
  return reshape(nll, {rows});
}

}  // namespace ssmtraj::uncertainty
