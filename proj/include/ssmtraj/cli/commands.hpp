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

#ifndef SSMTRAJ_CLI_COMMANDS_HPP_
#define SSMTRAJ_CLI_COMMANDS_HPP_

#include "ssmtraj/training/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ssmtraj::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char * kDatasetName = "dataset.ssmg";
inline constexpr const char * kCheckpointName = "model.ckpt";
inline constexpr const char * kTrainLogName = "train_log.tsv";
inline constexpr const char * kMetricsName = "metrics.tsv";
inline constexpr const char * kPlotName = "plot.tsv";

enum class Baseline
{
  ConstantVelocity,
  ConstantAcceleration,
};

/// CV or CA extrapolation from the last observed states, without covariances.
training::PredictionResult baseline_predict(const data::GraphSequence & sample, Baseline kind);

/**
 * Subcommands synth, ingest, train, eval and export-plot. Returns the
 * process exit code: 0 success, 1 runtime failure, 2 usage or config error.
 */
int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);
int run_cli(int argc, char ** argv);

}  // namespace ssmtraj::cli

#endif  // SSMTRAJ_CLI_COMMANDS_HPP_
