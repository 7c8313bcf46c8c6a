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

#include "ssmtraj/cli/plot.hpp"

#include "ssmtraj/numcore/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace ssmtraj::cli
{

namespace
{

std::string format(double v)
{
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

}  // namespace

Ellipse two_sigma_ellipse(const evaluation::Cov2 & p)
{
  const double a = p[0];
  const double b = 0.5 * (p[1] + p[2]);
  const double d = p[3];
  const double mid = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), b);
  // eigenvalues mid +- r; clamp tiny negative round-off
  const double l1 = std::max(mid + r, 0.0);
  const double l2 = std::max(mid - r, 0.0);
  return {2.0 * std::sqrt(l1), 2.0 * std::sqrt(l2), 0.5 * std::atan2(2.0 * b, a - d)};
}

void write_plot(
  std::ostream & out, const std::vector<data::GraphSequence> & samples,
  const std::vector<training::PredictionResult> & predictions)
{
  require(samples.size() == predictions.size(), "write_plot: one prediction per sample");
  out << "sample\tagent\tkind\tstep\tx\ty\tmajor\tminor\tangle\n";
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto & sample = samples[s];
    const auto & pred = predictions[s];
    for (std::size_t a = 0; a < sample.num_agents(); ++a) {
      const auto id = std::to_string(sample.agent_ids[a]);
      auto row = [&](const char * kind, std::size_t step, double x, double y) {
        out << s << '\t' << id << '\t' << kind << '\t' << step << '\t' << format(x) << '\t' << format(y);
      };
      for (std::size_t t = 0; t < sample.observed_steps(); ++t) {
        row("observed", t, sample.observed[t][a].x, sample.observed[t][a].y);
        out << "\t-\t-\t-\n";
      }
      for (std::size_t k = 0; k < sample.horizon(); ++k) {
        row("truth", k + 1, sample.future[k][a].x, sample.future[k][a].y);
        out << "\t-\t-\t-\n";
      }
      for (std::size_t k = 0; k < pred.states.size(); ++k) {
        row("predicted", k + 1, pred.states[k][a].x, pred.states[k][a].y);
        if (pred.covariance.empty()) {
          out << "\t-\t-\t-\n";
        } else {
          const Ellipse e = two_sigma_ellipse(pred.covariance[k][a]);
          out << '\t' << format(e.major) << '\t' << format(e.minor) << '\t' << format(e.angle) << '\n';
        }
      }
    }
  }
}

}  // namespace ssmtraj::cli
