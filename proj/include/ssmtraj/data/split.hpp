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


#ifndef SSMTRAJ_DATA_SPLIT_HPP_
#define SSMTRAJ_DATA_SPLIT_HPP_

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/rng.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace ssmtraj::data
{

template <typename T>
struct Partitions
{
  std::vector<T> train;
  std::vector<T> validation;
  std::vector<T> test;
};

/// Sizes (train, validation, test): floors of n * fraction, remainder to train.
std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3> & fractions);

/// Seeded shuffle, then consecutive blocks of split_sizes().
template <typename T>
Partitions<T> split(
  const std::vector<T> & samples, std::uint64_t seed, const std::array<double, 3> & fractions = {0.8, 0.1, 0.1})
{
  const auto sizes = split_sizes(samples.size(), fractions);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  numcore::Rng rng(seed);
  rng.shuffle(order);
  Partitions<T> out;
  std::size_t k = 0;
  for (; k < sizes[0]; ++k) {
    out.train.push_back(samples[order[k]]);
  }
  for (; k < sizes[0] + sizes[1]; ++k) {
    out.validation.push_back(samples[order[k]]);
  }
  for (; k < order.size(); ++k) {
    out.test.push_back(samples[order[k]]);
  }
  return out;
}

}  // namespace ssmtraj::data

#endif  // SSMTRAJ_DATA_SPLIT_HPP_
