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


#include "ssmtraj/training/optimizer.hpp"

#include "ssmtraj/numcore/errors.hpp"

#include <cmath>

namespace ssmtraj::training
{

double gradient_norm(const numcore::ParameterList & params)
{
  double sq = 0.0;
  for (const auto & p : params) {
    for (double g : p.tensor.grad()) {
      sq += g * g;
    }
  }
  return std::sqrt(sq);
}

Adam::Adam(numcore::ParameterList params, const AdamOptions & options) : params_(std::move(params)), o_(options)
{
  require(o_.learning_rate >= 0.0, "Adam: learning rate must be non-negative");
  for (const auto & p : params_) {
    require(p.tensor.is_leaf() && p.tensor.requires_grad(), "Adam: parameters must be tracked leaves");
    m_.emplace_back(p.tensor.numel(), 0.0);
    v_.emplace_back(p.tensor.numel(), 0.0);
  }
}

double Adam::step()
{
  const double norm = gradient_norm(params_);
  if (!std::isfinite(norm)) {
    throw DivergenceError("training", "gradient is not finite");
  }
  const double scale = o_.clip_norm > 0.0 && norm > o_.clip_norm ? o_.clip_norm / norm : 1.0;
  ++t_;
  const double c1 = 1.0 - std::pow(o_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(o_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto & p = params_[k].tensor;
    const auto g = p.grad();
    auto w = p.mutable_values();
    auto & m = m_[k];
    auto & v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g.empty() ? 0.0 : g[i] * scale;
      m[i] = o_.beta1 * m[i] + (1.0 - o_.beta1) * gi;
      v[i] = o_.beta2 * v[i] + (1.0 - o_.beta2) * gi * gi;
      const double update = (m[i] / c1) / (std::sqrt(v[i] / c2) + o_.epsilon);
      w[i] -= o_.learning_rate * (update + o_.weight_decay * w[i]);
    }
  }
  zero_grad();
  return norm;
}

void Adam::zero_grad()
{
  for (auto & p : params_) {
    p.tensor.zero_grad();
  }
}

}  // namespace ssmtraj::training
