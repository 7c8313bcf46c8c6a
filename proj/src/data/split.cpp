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


#include "ssmtraj/data/split.hpp"

namespace ssmtraj::data
{

std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3> & f)
{
  for (double x : f) {
    require(x >= 0.0, "split: fractions must be non-negative");
  }
  require(std::abs(f[0] + f[1] + f[2] - 1.0) <= 1e-9, "split: fractions must sum to 1");
  const auto nd = static_cast<double>(n);
  // 1e-9 guards against 0.1 * 10 landing just below 1
  const auto validation = static_cast<std::size_t>(std::floor(nd * f[1] + 1e-9));
  const auto test = static_cast<std::size_t>(std::floor(nd * f[2] + 1e-9));
  return {n - validation - test, validation, test};
}

}  // namespace ssmtraj::data
