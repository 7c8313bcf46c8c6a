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

#include "ssmtraj/cli/commands.hpp"

#include "ssmtraj/cli/plot.hpp"
#include "ssmtraj/cli/run_config.hpp"
#include "ssmtraj/data/container.hpp"
#include "ssmtraj/data/split.hpp"
#include "ssmtraj/evaluation/baselines.hpp"
#include "ssmtraj/numcore/checkpoint.hpp"
#include "ssmtraj/numcore/errors.hpp"
#include "ssmtraj/training/trainer.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace ssmtraj::cli
{

namespace fs = std::filesystem;

namespace
{

/// Flags shared by every subcommand; unset ones leave the config untouched.
struct Common
{
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

void add_common(CLI::App & cmd, Common & c, bool out_required)
{
  cmd.add_option("--config", c.config, "INI run config")->check(CLI::ExistingFile);
  cmd.add_option("--seed", c.seed, "seed for generation, split and initialization");
  auto * o = cmd.add_option("--out", c.out, "output directory");
  if (out_required) {
    o->required();
  }
}

RunConfig resolve(const Common & c)
{
  RunConfig rc;
  if (c.config) {
    rc = read_run_config(*c.config);
  }
  if (c.seed) {
    rc.seed = *c.seed;
  }
  rc.propagate_seed();
  return rc;
}

void prepare_out(const fs::path & dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

std::ofstream open_out(const fs::path & path)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return os;
}

training::ModelConfig with_data_dt(training::ModelConfig m, const std::vector<data::GraphSequence> & samples)
{
  if (!samples.empty()) {
    m.dt = samples.front().dt;
  }
  return m;
}

std::vector<data::GraphSequence> select_split(
  const std::vector<data::GraphSequence> & all, const RunConfig & rc, const std::string & name)
{
  if (name == "all") {
    return all;
  }
  auto parts = data::split(all, rc.seed, rc.split);
  if (name == "train") {
    return parts.train;
  }
  if (name == "validation") {
    return parts.validation;
  }
  return parts.test;
}

training::TrajectoryModel load_model(const RunConfig & rc, const fs::path & checkpoint)
{
  training::TrajectoryModel model(rc.model);
  auto params = model.parameters();
  numcore::restore_parameters(params, numcore::load_checkpoint(checkpoint));
  return model;
}

/// Config for commands that consume a checkpoint: the file passed with
/// --config, else the resolved config saved beside the checkpoint.
RunConfig resolve_for_checkpoint(Common c, const std::optional<fs::path> & checkpoint)
{
  if (!c.config && checkpoint) {
    const fs::path beside = checkpoint->parent_path() / kResolvedConfigName;
    if (fs::exists(beside)) {
      c.config = beside;
    }
  }
  return resolve(c);
}

std::vector<training::PredictionResult> predictions(
  const std::vector<data::GraphSequence> & samples, const RunConfig & rc,
  const std::optional<fs::path> & checkpoint, const std::optional<std::string> & baseline)
{
  if (baseline) {
    const Baseline kind = *baseline == "cv" ? Baseline::ConstantVelocity : Baseline::ConstantAcceleration;
    std::vector<training::PredictionResult> out;
    out.reserve(samples.size());
    for (const auto & s : samples) {
      out.push_back(baseline_predict(s, kind));
    }
    return out;
  }
  return load_model(rc, *checkpoint).predict(samples);
}

void require_source(const std::optional<fs::path> & checkpoint, const std::optional<std::string> & baseline)
{
  if (checkpoint.has_value() == baseline.has_value()) {
    throw ConfigError("give exactly one of --checkpoint and --baseline");
  }
}

int cmd_synth(const Common & common, const std::optional<std::string> & kind, const data::SynthOptions & flags,
              const std::vector<std::string> & given, std::ostream & out)
{
  RunConfig rc = resolve(common);
  auto given_flag = [&](const char * f) { return std::find(given.begin(), given.end(), f) != given.end(); };
  if (kind) {
    rc.synth.kind = data::parse_synth_kind(*kind);
  }
  if (given_flag("scenes")) {
    rc.synth.scenes = flags.scenes;
  }
  if (given_flag("agents")) {
    rc.synth.agents = flags.agents;
  }
  if (given_flag("noise")) {
    rc.synth.noise_std = flags.noise_std;
  }
  if (given_flag("radius")) {
    rc.synth.radius = flags.radius;
  }
  if (given_flag("speed")) {
    rc.synth.speed = flags.speed;
  }
  if (given_flag("frames")) {
    rc.synth.frames = flags.frames;
  }
  rc.propagate_seed();
  rc.validate();
  prepare_out(common.out);
  const auto scenes = data::synth_generate(rc.synth);
  const auto windows = data::make_windows(scenes, rc.windows);
  data::save_processed(common.out / kDatasetName, windows);
  write_run_config(common.out / kResolvedConfigName, rc);
  out << "synth: " << scenes.size() << " scenes, " << windows.size() << " windows -> "
      << (common.out / kDatasetName).string() << '\n';
  return kExitOk;
}

int cmd_ingest(const Common & common, const fs::path & input, std::ostream & out)
{
  RunConfig rc = resolve(common);
  rc.validate();
  prepare_out(common.out);
  const auto scenes = data::ingest_table(input, rc.schema);
  const auto windows = data::make_windows(scenes, rc.windows);
  data::save_processed(common.out / kDatasetName, windows);
  write_run_config(common.out / kResolvedConfigName, rc);
  out << "ingest: " << scenes.size() << " scenes, " << windows.size() << " windows -> "
      << (common.out / kDatasetName).string() << '\n';
  return kExitOk;
}

int cmd_train(
  const Common & common, const fs::path & data_path, const std::optional<std::string> & ablation,
  const std::optional<std::size_t> & epochs, const std::optional<fs::path> & init, std::ostream & out)
{
  RunConfig rc = resolve(common);
  if (ablation) {
    try {
      rc.model = training::ModelConfig::ablation(*ablation, rc.model);
    } catch (const ContractViolation & e) {
      throw ConfigError(e.what());
    }
  }
  if (epochs) {
    rc.model.epochs = *epochs;
  }
  const auto samples = data::load_processed(data_path);
  if (samples.empty()) {
    throw std::runtime_error("train: dataset " + data_path.string() + " has no samples");
  }
  rc.model = with_data_dt(rc.model, samples);
  rc.validate();
  auto parts = data::split(samples, rc.seed, rc.split);
  if (parts.train.empty()) {
    throw std::runtime_error("train: the training partition is empty");
  }
  prepare_out(common.out);
  write_run_config(common.out / kResolvedConfigName, rc);

  training::TrajectoryModel model(rc.model);
  if (init) {
    auto params = model.parameters();
    numcore::restore_parameters(params, numcore::load_checkpoint(*init));
  }
  std::ofstream log = open_out(common.out / kTrainLogName);
  training::TrainOptions o;
  o.checkpoint = common.out / kCheckpointName;
  o.log = &log;
  o.target_val_ade = rc.target_val_ade;
  const auto result = training::train(model, parts.train, parts.validation, o);
  out << "train: " << rc.model.ablation_name() << ", " << result.log.size() << " epochs, best val ADE "
      << result.best_val_ade << " at epoch " << result.best_epoch << " -> " << o.checkpoint.string() << '\n';
  return kExitOk;
}

int cmd_eval(
  const Common & common, const fs::path & data_path, const std::optional<fs::path> & checkpoint,
  const std::optional<std::string> & baseline, const std::string & split_name, std::ostream & out)
{
  require_source(checkpoint, baseline);
  RunConfig rc = resolve_for_checkpoint(common, checkpoint);
  const auto all = data::load_processed(data_path);
  rc.model = with_data_dt(rc.model, all);
  rc.validate();
  const auto samples = select_split(all, rc, split_name);
  if (samples.empty()) {
    throw std::runtime_error("eval: the '" + split_name + "' partition is empty");
  }
  const auto preds = predictions(samples, rc, checkpoint, baseline);
  std::vector<evaluation::MetricReport> reports;
  reports.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    reports.push_back(evaluation::compute_metrics(preds[i].as_scene_prediction(), training::truth_paths(samples[i])));
  }
  const auto report = evaluation::aggregate(reports);
  evaluation::write_tsv(out, {report});
  if (!common.out.empty()) {
    prepare_out(common.out);
    std::ofstream os = open_out(common.out / kMetricsName);
    evaluation::write_tsv(os, {report});
    write_run_config(common.out / kResolvedConfigName, rc);
  }
  return kExitOk;
}

int cmd_export_plot(
  const Common & common, const fs::path & data_path, const std::optional<fs::path> & checkpoint,
  const std::optional<std::string> & baseline, const std::string & split_name, std::size_t limit,
  std::ostream & out)
{
  require_source(checkpoint, baseline);
  RunConfig rc = resolve_for_checkpoint(common, checkpoint);
  const auto all = data::load_processed(data_path);
  rc.model = with_data_dt(rc.model, all);
  rc.validate();
  auto samples = select_split(all, rc, split_name);
  if (limit > 0 && samples.size() > limit) {
    samples.resize(limit);
  }
  const auto preds = predictions(samples, rc, checkpoint, baseline);
  prepare_out(common.out);
  std::ofstream os = open_out(common.out / kPlotName);
  write_plot(os, samples, preds);
  write_run_config(common.out / kResolvedConfigName, rc);
  out << "export-plot: " << samples.size() << " samples -> " << (common.out / kPlotName).string() << '\n';
  return kExitOk;
}

}  // namespace

training::PredictionResult baseline_predict(const data::GraphSequence & sample, Baseline kind)
{
  require(sample.observed_steps() >= 2, "baseline_predict: needs two observed frames");
  const auto & last = sample.observed.back();
  const auto & prev = sample.observed[sample.observed_steps() - 2];
  training::PredictionResult r;
  r.states.assign(sample.horizon(), std::vector<dynamics::AgentState>(sample.num_agents()));
  for (std::size_t a = 0; a < sample.num_agents(); ++a) {
    evaluation::Path path;
    evaluation::Point accel{0.0, 0.0};
    if (kind == Baseline::ConstantVelocity) {
      path = evaluation::cv_predict(last[a], sample.horizon(), sample.dt);
    } else {
      accel = evaluation::estimate_acceleration(prev[a], last[a], sample.dt);
      path = evaluation::ca_predict(last[a], accel, sample.horizon(), sample.dt);
    }
    for (std::size_t k = 0; k < sample.horizon(); ++k) {
      const double t = static_cast<double>(k + 1) * sample.dt;
      r.states[k][a] = {path[k].x, path[k].y, last[a].vx + accel.x * t, last[a].vy + accel.y * t};
    }
  }
  return r;
}

int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Multi-agent trajectory prediction with selective state spaces", "ssmtraj"};
  app.require_subcommand(1);

  Common common;
  data::SynthOptions synth_flags;
  std::optional<std::string> kind;
  fs::path input;
  fs::path data_path;
  std::optional<std::string> ablation;
  std::optional<std::size_t> epochs;
  std::optional<fs::path> checkpoint;
  std::optional<std::string> baseline;
  std::string split_name = "test";
  std::size_t limit = 0;

  auto * synth = app.add_subcommand("synth", "generate synthetic scenes and window them");
  add_common(*synth, common, true);
  synth->add_option("--kind", kind, "highway or roundabout")->check(CLI::IsMember({"highway", "roundabout"}));
  synth->add_option("--scenes", synth_flags.scenes, "number of scenes");
  synth->add_option("--agents", synth_flags.agents, "agents per scene")->check(CLI::PositiveNumber);
  synth->add_option("--noise", synth_flags.noise_std, "observation noise std")->check(CLI::NonNegativeNumber);
  synth->add_option("--radius", synth_flags.radius, "roundabout radius, m (0 = random)")->check(CLI::NonNegativeNumber);
  synth->add_option("--speed", synth_flags.speed, "agent speed, m/s (0 = random)")->check(CLI::NonNegativeNumber);
  synth->add_option("--frames", synth_flags.frames, "frames per scene")->check(CLI::PositiveNumber);

  auto * ingest = app.add_subcommand("ingest", "read a trajectory table and window it");
  add_common(*ingest, common, true);
  ingest->add_option("--input", input, "comma-separated table with a header row")->required()->check(CLI::ExistingFile);

  auto * train = app.add_subcommand("train", "train a model on a processed dataset");
  add_common(*train, common, true);
  train->add_option("--data", data_path, "processed dataset")->required()->check(CLI::ExistingFile);
  train->add_option("--ablation", ablation, "H1..H8");
  train->add_option("--epochs", epochs, "epoch count")->check(CLI::PositiveNumber);
  train->add_option("--checkpoint", checkpoint, "initial weights")->check(CLI::ExistingFile);

  auto add_source = [&](CLI::App & cmd) {
    cmd.add_option("--data", data_path, "processed dataset")->required()->check(CLI::ExistingFile);
    cmd.add_option("--checkpoint", checkpoint, "trained weights")->check(CLI::ExistingFile);
    cmd.add_option("--baseline", baseline, "cv or ca instead of a model")->check(CLI::IsMember({"cv", "ca"}));
    cmd.add_option("--split", split_name, "train, validation, test or all")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}));
  };
  auto * eval = app.add_subcommand("eval", "report ADE FDE MR APDE ANLL FNLL");
  add_common(*eval, common, false);
  add_source(*eval);
  auto * plot = app.add_subcommand("export-plot", "dump trajectories and 2-sigma ellipses");
  add_common(*plot, common, true);
  add_source(*plot);
  plot->add_option("--samples", limit, "at most this many samples (0 = all)");

  std::vector<const char *> argv{"ssmtraj"};
  for (const auto & a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError & e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      std::vector<std::string> given;
      for (const char * f : {"scenes", "agents", "noise", "radius", "speed", "frames"}) {
        if (synth->count(std::string("--") + f) > 0) {
          given.emplace_back(f);
        }
      }
      return cmd_synth(common, kind, synth_flags, given, out);
    }
    if (ingest->parsed()) {
      return cmd_ingest(common, input, out);
    }
    if (train->parsed()) {
      return cmd_train(common, data_path, ablation, epochs, checkpoint, out);
    }
    if (eval->parsed()) {
      return cmd_eval(common, data_path, checkpoint, baseline, split_name, out);
    }
    return cmd_export_plot(common, data_path, checkpoint, baseline, split_name, limit, out);
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError & e) {
    err << "diverged in " << e.stage() << ": " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run_cli(int argc, char ** argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace ssmtraj::cli
