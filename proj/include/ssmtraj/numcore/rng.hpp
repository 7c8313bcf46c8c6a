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

#ifndef SSMTRAJ_NUMCORE_RNG_HPP_
#define SSMTRAJ_NUMCORE_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ssmtraj::numcore
{

/**
 * Seeded pseudo-random source that reproduces across platforms.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The transforms on top (uniform doubles from the top 53 bits,
 * Box-Muller normals, rejection-sampled indices) are implemented here because
 * the standard library distributions are implementation-defined.
 */
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  template <class T>
  void shuffle(std::vector<T> & items)
  {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

  /// Independent generator derived from this one's seed and a stream id.
  Rng fork(std::uint64_t stream) const;

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool has_spare_{false};
  double spare_{0.0};
};

}  // namespace ssmtraj::numcore

#endif  // SSMTRAJ_NUMCORE_RNG_HPP_
