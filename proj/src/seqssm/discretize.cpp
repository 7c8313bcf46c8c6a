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

#include "ssmtraj/seqssm/discretize.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/linalg.hpp"
#include "ssmtraj/numcore/ops.hpp"

#include <cmath>

namespace ssmtraj::seqssm
{

using namespace numcore;

namespace
{

// Below this |d a| the closed forms lose digits to cancellation; the
// truncated series are accurate to ~1e-15 relative there.
constexpr double kSeriesThreshold = 1e-3;

}  // namespace

double zoh_gain(double delta, double a)
{
  const double x = delta * a;
  if (std::abs(x) < kSeriesThreshold) {
    return delta * (1.0 + x * (1.0 / 2 + x * (1.0 / 6 + x * (1.0 / 24 + x / 120))));
  }
  return std::expm1(x) / a;
}

double zoh_gain_ddelta(double delta, double a) { return std::exp(delta * a); }

double zoh_gain_da(double delta, double a)
{
  const double x = delta * a;
  if (std::abs(x) < kSeriesThreshold) {
    return delta * delta * (1.0 / 2 + x * (1.0 / 3 + x * (1.0 / 8 + x / 30)));
  }
  return (x * std::exp(x) - std::expm1(x)) / (a * a);
}

double zoh_gain_da_from(double delta, double a, double decay, double gain)
{
  const double x = delta * a;
  if (std::abs(x) < kSeriesThreshold) {
    return delta * delta * (1.0 / 2 + x * (1.0 / 3 + x * (1.0 / 8 + x / 30)));
  }
  return (x * decay - a * gain) / (a * a);
}

Discretized zoh_discretize(const Tensor & a, const Tensor & b, double delta)
{
  require(delta > 0.0, "zoh_discretize needs a positive step");
  require(a.rank() == 2 && a.dim(0) == a.dim(1), "zoh_discretize: A must be square");
  require(b.rank() == 2 && b.dim(0) == a.dim(0), "zoh_discretize: B rows must match A");
  const std::size_t n = a.dim(0);
  const std::size_t m = b.dim(1);
  Tensor top = concat({a * delta, b * delta}, 1);
  Tensor augmented = concat({top, Tensor::zeros({m, n + m})}, 0);
  Tensor e = slice(matexp(augmented), 0, 0, n);
  return {slice(e, 1, 0, n), slice(e, 1, n, n + m)};
}

Discretized zoh_discretize_diagonal(const Tensor & a, const Tensor & b, double delta)
{
  require(delta > 0.0, "zoh_discretize needs a positive step");
  require(a.rank() == 1, "zoh_discretize_diagonal: a must be a vector");
  require(b.rank() == 2 && b.dim(0) == a.dim(0), "zoh_discretize_diagonal: B rows must match a");
  const std::size_t n = a.dim(0);
  std::vector<double> e(n);
  std::vector<double> gain(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = std::exp(delta * a[i]);
    gain[i] = zoh_gain(delta, a[i]);
  }
  Tensor a_bar = record_op({n}, e, {a}, [delta](GradContext & ctx) {
    auto g = ctx.input_grad(0);
    const auto go = ctx.out_grad();
    const auto out = ctx.out_value();
    for (std::size_t i = 0; i < go.size(); ++i) {
      g[i] += go[i] * delta * out[i];
    }
  });
  Tensor g_tensor = record_op({n, 1}, gain, {a}, [delta](GradContext & ctx) {
    auto g = ctx.input_grad(0);
    const auto go = ctx.out_grad();
    const auto av = ctx.input(0).values();
    for (std::size_t i = 0; i < go.size(); ++i) {
      g[i] += go[i] * zoh_gain_da(delta, av[i]);
    }
  });
  // diag(A_bar) reshaped to a matrix for a uniform return type
  Tensor diag = Tensor::eye(n) * reshape(a_bar, {1, n});
  return {diag, b * g_tensor};
}

}  // namespace ssmtraj::seqssm
