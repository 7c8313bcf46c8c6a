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


#include "ssmtraj/training/trainer.hpp"

#include "ssmtraj/numcore/checkpoint.hpp"
#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/numcore/ops.hpp"
#include "ssmtraj/training/optimizer.hpp"

#include <chrono>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

namespace ssmtraj::training
{

namespace
{

numcore::ParameterList snapshot(const numcore::ParameterList & params)
{
  numcore::ParameterList out;
  for (const auto & p : params) {
    out.push_back({p.name, p.tensor.clone(false)});
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> make_batches(
  const std::vector<data::GraphSequence> & samples, std::size_t size, numcore::Rng & rng)
{
  require(size >= 1, "make_batches: batch size must be positive");
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  rng.shuffle(order);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i : order) {
    const auto & s = samples[i];
    groups[{s.num_agents(), s.observed_steps(), s.horizon()}].push_back(i);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (auto & [key, members] : groups) {
    for (std::size_t k = 0; k < members.size(); k += size) {
      batches.emplace_back(
        members.begin() + static_cast<std::ptrdiff_t>(k),
        members.begin() + static_cast<std::ptrdiff_t>(std::min(members.size(), k + size)));
    }
  }
  // interleave groups instead of visiting them one after another
  rng.shuffle(batches);
  return batches;
}

evaluation::MetricReport evaluate(const TrajectoryModel & model, const std::vector<data::GraphSequence> & samples)
{
  require(!samples.empty(), "evaluate: no samples");
  const auto preds = model.predict(samples);
  std::vector<evaluation::MetricReport> reports;
  reports.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    reports.push_back(evaluation::compute_metrics(preds[i].as_scene_prediction(), truth_paths(samples[i])));
  }
  return evaluation::aggregate(reports);
}

void write_log_header(std::ostream & os) { os << "epoch\ttrain_loss\tval_ADE\tval_FDE\twall_seconds\n"; }

void write_log_row(std::ostream & os, const EpochLog & r)
{
  os << r.epoch << '\t' << r.train_loss << '\t' << r.val_ade << '\t' << r.val_fde << '\t' << r.wall_seconds << '\n';
  os.flush();
}

TrainResult train(
  TrajectoryModel & model, const std::vector<data::GraphSequence> & train_set,
  const std::vector<data::GraphSequence> & validation, const TrainOptions & options)
{
  require(!train_set.empty(), "train: the training partition is empty");
  const ModelConfig & c = model.config();
  const auto & val = validation.empty() ? train_set : validation;
  auto params = model.parameters();
  Adam adam(params, {c.learning_rate, c.beta1, c.beta2, 1e-8, c.weight_decay, c.clip_norm});
  numcore::Rng rng = numcore::Rng(c.seed).fork(100);
  const auto started = std::chrono::steady_clock::now();

  TrainResult result;
  result.best = snapshot(params);
  result.best_val_ade = std::numeric_limits<double>::infinity();
  if (options.log != nullptr) {
    write_log_header(*options.log);
  }
  for (std::size_t epoch = 1; epoch <= c.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t batches = 0;
    try {
      for (const auto & idx : make_batches(train_set, c.batch_size, rng)) {
        std::vector<const data::GraphSequence *> members;
        for (std::size_t i : idx) {
          members.push_back(&train_set[i]);
        }
        const Batch b = make_batch(members, c);
        const Tensor loss = model.loss(model.forward(b), b);
        loss_sum += loss.item();
        ++batches;
        numcore::backward(loss);
        adam.step();
      }
    } catch (const DivergenceError &) {
      numcore::restore_parameters(params, result.best);
      throw;
    }
    const auto report = evaluate(model, val);
    EpochLog row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(batches);
    row.val_ade = report.ade;
    row.val_fde = report.fde;
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (report.ade < result.best_val_ade) {
      result.best_val_ade = report.ade;
      result.best_epoch = epoch;
      result.best = snapshot(params);
      if (!options.checkpoint.empty()) {
        numcore::save_checkpoint(options.checkpoint, result.best);
      }
    }
    result.log.push_back(row);
    if (options.log != nullptr) {
      write_log_row(*options.log, row);
    }
    if (options.on_epoch) {
      options.on_epoch(row);
    }
    if (options.target_val_ade > 0.0 && report.ade <= options.target_val_ade) {
      result.stopped_early = epoch < c.epochs;
      break;
    }
  }
  numcore::restore_parameters(params, result.best);
  return result;
}

}  // namespace ssmtraj::training
