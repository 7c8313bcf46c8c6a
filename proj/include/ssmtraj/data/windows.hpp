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


#ifndef SSMTRAJ_DATA_WINDOWS_HPP_
#define SSMTRAJ_DATA_WINDOWS_HPP_

#include "ssmtraj/data/scene.hpp"

#include <vector>

namespace ssmtraj::data
{

struct WindowOptions
{
  std::size_t observed{75};
  std::size_t horizon{25};
  /// raw frames between consecutive window starts
  std::size_t stride{1};
  /// keep every k-th raw frame inside a window
  std::size_t downsample{1};
  double radius{scenegraph::kDefaultRadius};
};

/**
 * Sliding windows over the scene's frame range. A window starting at raw
 * frame s uses frames s, s + k, ..., s + (observed + horizon - 1) k with
 * k = downsample; agents missing any of those frames are left out and
 * windows without agents are dropped.
 */
std::vector<GraphSequence> make_windows(const Scene & scene, const WindowOptions & options);

/// make_windows over every scene in parallel, concatenated in scene order.
std::vector<GraphSequence> make_windows(const std::vector<Scene> & scenes, const WindowOptions & options);

}  // namespace ssmtraj::data

#endif  // SSMTRAJ_DATA_WINDOWS_HPP_
