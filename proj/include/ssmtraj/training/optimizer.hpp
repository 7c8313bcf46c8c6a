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


#ifndef SSMTRAJ_TRAINING_OPTIMIZER_HPP_
#define SSMTRAJ_TRAINING_OPTIMIZER_HPP_

#include "ssmtraj/numcore/layers.hpp"

#include <vector>

namespace ssmtraj::training
{

struct AdamOptions
{
  double learning_rate{1e-3};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};
  /// decoupled, applied as p -= lr * decay * p
  double weight_decay{0.0};
  /// global gradient-norm bound; <= 0 disables clipping
  double clip_norm{1.0};
};

/// Adam with bias correction over a fixed parameter list.
class Adam
{
public:
  Adam(numcore::ParameterList params, const AdamOptions & options);

  /// Clips, updates and clears the gradients. Returns the norm before clipping.
  double step();
  void zero_grad();
  std::size_t steps() const { return t_; }

private:
  numcore::ParameterList params_;
  AdamOptions o_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t t_{0};
};

/// Global L2 norm of the accumulated gradients, summed in parameter order.
double gradient_norm(const numcore::ParameterList & params);

}  // namespace ssmtraj::training

#endif  // SSMTRAJ_TRAINING_OPTIMIZER_HPP_
