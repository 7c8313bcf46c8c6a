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


#include "ssmtraj/evaluation/metrics.hpp"

#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/uncertainty/ekf.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace ssmtraj::evaluation
{

namespace
{

double distance(const Point & a, const Point & b) { return std::hypot(a.x - b.x, a.y - b.y); }

double nll(const Point & truth, const Point & mean, const Cov2 & c)
{
  return uncertainty::gaussian_nll(
    {truth.x, truth.y}, {mean.x, mean.y}, numcore::Tensor({2, 2}, {c[0], c[1], c[2], c[3]}));
}

}  // namespace

MetricReport compute_metrics(const ScenePrediction & pred, const std::vector<Path> & truth, double miss_threshold)
{
  const std::size_t agents = truth.size();
  require(agents >= 1, "compute_metrics: no agents");
  require(pred.mean.size() == agents, "compute_metrics: prediction and truth agent sets differ");
  const bool with_cov = !pred.covariance.empty();
  require(!with_cov || pred.covariance.size() == agents, "compute_metrics: one covariance track per agent");
  MetricReport r;
  double anll = 0.0;
  double fnll = 0.0;
  for (std::size_t a = 0; a < agents; ++a) {
    const Path & p = pred.mean[a];
    const Path & t = truth[a];
    const std::size_t steps = t.size();
    require(steps >= 1, "compute_metrics: empty horizon");
    require(p.size() == steps, "compute_metrics: prediction and truth horizons differ");
    double ade = 0.0;
    double apde = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      ade += distance(p[k], t[k]);
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto & q : t) {
        nearest = std::min(nearest, distance(p[k], q));
      }
      apde += nearest;
    }
    const double fde = distance(p.back(), t.back());
    r.ade += ade / static_cast<double>(steps);
    r.apde += apde / static_cast<double>(steps);
    r.fde += fde;
    r.mr += fde > miss_threshold ? 1.0 : 0.0;
    if (with_cov) {
      const auto & c = pred.covariance[a];
      require(c.size() == steps, "compute_metrics: covariance and truth horizons differ");
      double sum = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        sum += nll(t[k], p[k], c[k]);
      }
      anll += sum / static_cast<double>(steps);
      fnll += nll(t.back(), p.back(), c.back());
    }
  }
  const double n = static_cast<double>(agents);
  r.ade /= n;
  r.fde /= n;
  r.mr /= n;
  r.apde /= n;
  if (with_cov) {
    r.anll = anll / n;
    r.fnll = fnll / n;
  }
  r.count = agents;
  return r;
}

MetricReport aggregate(const std::vector<MetricReport> & reports)
{
  require(!reports.empty(), "aggregate: no reports");
  MetricReport out;
  bool nll = true;
  double anll = 0.0;
  double fnll = 0.0;
  for (const auto & r : reports) {
    out.ade += r.ade;
    out.fde += r.fde;
    out.mr += r.mr;
    out.apde += r.apde;
    out.count += r.count;
    nll = nll && r.anll && r.fnll;
    if (nll) {
      anll += *r.anll;
      fnll += *r.fnll;
    }
  }
  const double n = static_cast<double>(reports.size());
  out.ade /= n;
  out.fde /= n;
  out.mr /= n;
  out.apde /= n;
  if (nll) {
    out.anll = anll / n;
    out.fnll = fnll / n;
  }
  return out;
}

std::string to_tsv(const MetricReport & r)
{
  std::ostringstream os;
  os.precision(6);
  auto opt = [&](const std::optional<double> & v) {
    if (v) {
      os << *v;
    } else {
      os << '-';
    }
  };
  os << r.ade << '\t' << r.fde << '\t' << r.mr << '\t' << r.apde << '\t';
  opt(r.anll);
  os << '\t';
  opt(r.fnll);
  return os.str();
}

void write_tsv(std::ostream & os, const std::vector<MetricReport> & rows)
{
  os << "ADE\tFDE\tMR\tAPDE\tANLL\tFNLL\n";
  for (const auto & r : rows) {
    os << to_tsv(r) << '\n';
  }
}

}  // namespace ssmtraj::evaluation
