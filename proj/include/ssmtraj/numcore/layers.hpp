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

#ifndef SSMTRAJ_NUMCORE_LAYERS_HPP_
#define SSMTRAJ_NUMCORE_LAYERS_HPP_

#include "ssmtraj/numcore/rng.hpp"
#include "ssmtraj/numcore/tensor.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace ssmtraj::numcore
{

struct NamedTensor
{
  std::string name;
  Tensor tensor;
};

/// Ordered parameter handles; order is the checkpoint order.
using ParameterList = std::vector<NamedTensor>;

/// Uniform Glorot initialization of a [fan_in, fan_out] weight, scaled by `gain`.
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng & rng, double gain = 1.0);

/// Affine map x * W + b over the last axis of x (row-vector convention).
class Linear
{
public:
  Linear() = default;
  Linear(std::size_t in, std::size_t out, bool bias, Rng & rng, double gain = 1.0);
  Linear(Tensor weight, Tensor bias);

  Tensor forward(const Tensor & x) const;
  void collect(const std::string & prefix, ParameterList & out) const;
  /// Copy whose parameters are untracked leaves.
  Linear detached() const;

  std::size_t in_features() const { return weight_.dim(0); }
  std::size_t out_features() const { return weight_.dim(1); }
  const Tensor & weight() const { return weight_; }
  const Tensor & bias() const { return bias_; }

private:
  Tensor weight_;
  Tensor bias_;
};

/// Stack of Linear layers with tanh between them (none after the last).
class Mlp
{
public:
  Mlp() = default;
  /// widths = {in, hidden..., out}.
  Mlp(const std::vector<std::size_t> & widths, Rng & rng, double output_gain = 1.0);
  explicit Mlp(std::vector<Linear> layers);

  Tensor forward(const Tensor & x) const;
  void collect(const std::string & prefix, ParameterList & out) const;
  Mlp detached() const;

  bool empty() const { return layers_.empty(); }
  std::size_t in_features() const { return layers_.front().in_features(); }
  std::size_t out_features() const { return layers_.back().out_features(); }
  const std::vector<Linear> & layers() const { return layers_; }

private:
  std::vector<Linear> layers_;
};

}  // namespace ssmtraj::numcore

#endif  // SSMTRAJ_NUMCORE_LAYERS_HPP_
