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


#ifndef SSMTRAJ_TESTS_RANDOM_HPP_
#define SSMTRAJ_TESTS_RANDOM_HPP_

#include "ssmtraj/numcore/rng.hpp"
#include "ssmtraj/numcore/tensor.hpp"

#include <utility>
#include <vector>

namespace ssmtraj::testing
{

/// Standard normal entries times `scale`.
inline numcore::Tensor randn(
  numcore::Shape shape, numcore::Rng & rng, double scale = 1.0, bool grad = false)
{
  std::vector<double> v(numcore::shape_numel(shape));
  for (auto & x : v) {
    x = rng.normal() * scale;
  }
  return numcore::Tensor(std::move(shape), std::move(v), grad);
}

}  // namespace ssmtraj::testing

#endif  // SSMTRAJ_TESTS_RANDOM_HPP_
