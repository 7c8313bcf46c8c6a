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


#ifndef SSMTRAJ_EVALUATION_METRICS_HPP_
#define SSMTRAJ_EVALUATION_METRICS_HPP_

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ssmtraj::evaluation
{

struct Point
{
  double x{0.0};
  double y{0.0};
};

/// Positions at prediction steps 1..t_f.
using Path = std::vector<Point>;
/// Row-major 2x2 position covariance.
using Cov2 = std::array<double, 4>;

inline constexpr double kMissThreshold = 2.0;

/// Predictions for every agent of one sample, agent order as in the truth.
struct ScenePrediction
{
  std::vector<Path> mean;
  /// Empty, or one covariance per agent and step.
  std::vector<std::vector<Cov2>> covariance;
};

struct MetricReport
{
  double ade{0.0};
  double fde{0.0};
  double mr{0.0};
  double apde{0.0};
  std::optional<double> anll;
  std::optional<double> fnll;
  /// agent trajectories behind the numbers
  std::size_t count{0};
};

/**
 * Metrics of one sample, averaged over its agents. MR counts agents whose
 * final error is strictly above `miss_threshold`. APDE takes, for each
 * predicted point, the distance to the nearest sampled truth point.
 */
MetricReport compute_metrics(
  const ScenePrediction & pred, const std::vector<Path> & truth, double miss_threshold = kMissThreshold);

/// Unweighted mean of per-sample reports; counts add.
MetricReport aggregate(const std::vector<MetricReport> & reports);

/// Tab-separated header and one row per report, in the order given.
void write_tsv(std::ostream & os, const std::vector<MetricReport> & rows);
std::string to_tsv(const MetricReport & report);

}  // namespace ssmtraj::evaluation

#endif  // SSMTRAJ_EVALUATION_METRICS_HPP_
