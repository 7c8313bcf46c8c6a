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

#include "ssmtraj/numcore/layers.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"

#include <cmath>

namespace ssmtraj::numcore
{

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng & rng, double gain)
{
  const double limit = gain * std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(fan_in * fan_out);
  for (auto & x : v) {
    x = rng.uniform(-limit, limit);
  }
  return Tensor({fan_in, fan_out}, std::move(v), true);
}

Linear::Linear(std::size_t in, std::size_t out, bool bias, Rng & rng, double gain)
: weight_(glorot_uniform(in, out, rng, gain))
{
  if (bias) {
    bias_ = Tensor::zeros({out}, true);
  }
}

Linear::Linear(Tensor weight, Tensor bias) : weight_(std::move(weight)), bias_(std::move(bias))
{
  require(weight_.defined() && weight_.rank() == 2, "Linear weight must be a matrix");
  if (bias_.defined()) {
    require(bias_.rank() == 1 && bias_.dim(0) == weight_.dim(1), "Linear bias has wrong length");
  }
}

Tensor Linear::forward(const Tensor & x) const
{
  const std::size_t in = weight_.dim(0);
  if (x.shape().back() != in) {
    throw ContractViolation(
      "Linear expects last axis " + std::to_string(in) + ", got " + shape_to_string(x.shape()));
  }
  Tensor flat = x.rank() == 2 ? x : reshape(x, {x.numel() / in, in});
  Tensor y = matmul(flat, weight_);
  if (bias_.defined()) {
    y = y + bias_;
  }
  if (x.rank() != 2) {
    Shape shape = x.shape();
    shape.back() = weight_.dim(1);
    y = reshape(y, std::move(shape));
  }
  return y;
}

void Linear::collect(const std::string & prefix, ParameterList & out) const
{
  out.push_back({prefix + ".weight", weight_});
  if (bias_.defined()) {
    out.push_back({prefix + ".bias", bias_});
  }
}

Linear Linear::detached() const
{
  return Linear(weight_.detach(), bias_.defined() ? bias_.detach() : Tensor());
}

Mlp::Mlp(const std::vector<std::size_t> & widths, Rng & rng, double output_gain)
{
  require(widths.size() >= 2, "Mlp needs input and output widths");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = i + 2 == widths.size();
    layers_.emplace_back(widths[i], widths[i + 1], true, rng, last ? output_gain : 1.0);
  }
}

Mlp::Mlp(std::vector<Linear> layers) : layers_(std::move(layers))
{
  require(!layers_.empty(), "Mlp needs at least one layer");
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    require(
      layers_[i].out_features() == layers_[i + 1].in_features(), "Mlp layer widths do not chain");
  }
}

Tensor Mlp::forward(const Tensor & x) const
{
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    if (i + 1 < layers_.size()) {
      h = tanh(h);
    }
  }
  return h;
}

void Mlp::collect(const std::string & prefix, ParameterList & out) const
{
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].collect(prefix + "." + std::to_string(i), out);
  }
}

Mlp Mlp::detached() const
{
  std::vector<Linear> copy;
  copy.reserve(layers_.size());
  for (const auto & l : layers_) {
    copy.push_back(l.detached());
  }
  return Mlp(std::move(copy));
}

}  // namespace ssmtraj::numcore
