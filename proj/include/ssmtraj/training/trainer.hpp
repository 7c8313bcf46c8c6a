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


#ifndef SSMTRAJ_TRAINING_TRAINER_HPP_
#define SSMTRAJ_TRAINING_TRAINER_HPP_

#include "ssmtraj/evaluation/metrics.hpp"
#include "ssmtraj/training/model.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

namespace ssmtraj::training
{

struct EpochLog
{
  std::size_t epoch{0};
  double train_loss{0.0};
  double val_ade{0.0};
  double val_fde{0.0};
  double wall_seconds{0.0};
};

struct TrainOptions
{
  /// written whenever validation ADE improves; empty keeps the best weights in memory only
  std::filesystem::path checkpoint;
  /// receives the header and one row per epoch
  std::ostream * log{nullptr};
  /// stop once validation ADE is at or below this, meters; 0 runs every epoch
  double target_val_ade{0.0};
  std::function<void(const EpochLog &)> on_epoch;
};

struct TrainResult
{
  std::vector<EpochLog> log;
  std::size_t best_epoch{0};
  double best_val_ade{0.0};
  numcore::ParameterList best;  ///< detached copy of the best weights
  bool stopped_early{false};
};

/// Sample indices grouped by (agents, T_obs, t_f), shuffled, cut into batches of at most `size`.
std::vector<std::vector<std::size_t>> make_batches(
  const std::vector<data::GraphSequence> & samples, std::size_t size, numcore::Rng & rng);

/// Per-sample metrics averaged over samples.
evaluation::MetricReport evaluate(const TrajectoryModel & model, const std::vector<data::GraphSequence> & samples);

void write_log_header(std::ostream & os);
void write_log_row(std::ostream & os, const EpochLog & row);

/**
 * Runs config().epochs epochs of Adam over shuffled batches. Validation
 * falls back to the training set when `validation` is empty. On return the
 * model holds the best-validation weights. A non-finite loss or gradient
 * restores those weights and rethrows the DivergenceError.
 */
TrainResult train(
  TrajectoryModel & model, const std::vector<data::GraphSequence> & train_set,
  const std::vector<data::GraphSequence> & validation, const TrainOptions & options = {});

}  // namespace ssmtraj::training

#endif  // SSMTRAJ_TRAINING_TRAINER_HPP_
