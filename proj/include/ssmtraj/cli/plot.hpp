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

#ifndef SSMTRAJ_CLI_PLOT_HPP_
#define SSMTRAJ_CLI_PLOT_HPP_

#include "ssmtraj/data/scene.hpp"
#include "ssmtraj/training/model.hpp"

#include <iosfwd>
#include <vector>

namespace ssmtraj::cli
{

/// Two-sigma ellipse of a 2x2 covariance: semi-axes 2 sqrt(lambda), angle of the major axis in radians.
struct Ellipse
{
  double major{0.0};
  double minor{0.0};
  double angle{0.0};
};

Ellipse two_sigma_ellipse(const evaluation::Cov2 & p);

/**
 * One row per point: sample, agent id, kind (observed, truth, predicted),
 * step, x, y and, for predicted rows, the ellipse columns. `predictions`
 * is parallel to `samples`; empty covariances leave the ellipse as "-".
 */
void write_plot(
  std::ostream & out, const std::vector<data::GraphSequence> & samples,
  const std::vector<training::PredictionResult> & predictions);

}  // namespace ssmtraj::cli

#endif  // SSMTRAJ_CLI_PLOT_HPP_
