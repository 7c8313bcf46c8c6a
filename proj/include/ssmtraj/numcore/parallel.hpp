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


#ifndef SSMTRAJ_NUMCORE_PARALLEL_HPP_
#define SSMTRAJ_NUMCORE_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace ssmtraj::numcore
{

/// Hardware concurrency, capped by SSMTRAJ_THREADS when it is set to a positive integer.
std::size_t worker_count();

/**
 * Calls fn(i) for i in [0, n) on up to worker_count() threads. Each index
 * runs exactly once; results written by index are therefore independent of
 * scheduling. The first exception thrown is rethrown after all workers stop.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t)> & fn);

}  // namespace ssmtraj::numcore

#endif  // SSMTRAJ_NUMCORE_PARALLEL_HPP_
