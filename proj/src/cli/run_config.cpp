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

#include "ssmtraj/cli/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

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

template <class T>
T parse_number(const std::string & text, const std::string & key)
{
  T v{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string & text, const std::string & key)
{
  if (text == "true" || text == "1") {
    return true;
  }
  if (text == "false" || text == "0") {
    return false;
  }
  throw ConfigError("invalid value '" + text + "' for " + key + " (expected true or false)");
}

struct Key
{
  std::function<std::string(const RunConfig &)> get;
  std::function<void(RunConfig &, const std::string &, const std::string &)> set;
};

template <class Access>
Key bind(Access access)
{
  using T = std::remove_cvref_t<decltype(access(std::declval<RunConfig &>()))>;
  Key k;
  k.get = [access](const RunConfig & c) -> std::string {
    const T & v = access(const_cast<RunConfig &>(c));
    if constexpr (std::is_same_v<T, bool>) {
      return v ? "true" : "false";
    } else if constexpr (std::is_same_v<T, double>) {
      return format(v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      return v;
    } else if constexpr (std::is_same_v<T, char>) {
      return v == '\t' ? std::string("tab") : std::string(1, v);
    } else if constexpr (std::is_same_v<T, data::SynthKind>) {
      return v == data::SynthKind::Highway ? "highway" : "roundabout";
    } else {
      return std::to_string(v);
    }
  };
  k.set = [access](RunConfig & c, const std::string & text, const std::string & name) {
    T & v = access(c);
    if constexpr (std::is_same_v<T, bool>) {
      v = parse_bool(text, name);
    } else if constexpr (std::is_same_v<T, std::string>) {
      v = text;
    } else if constexpr (std::is_same_v<T, char>) {
      if (text == "tab") {
        v = '\t';
      } else if (text.size() == 1) {
        v = text[0];
      } else {
        throw ConfigError("invalid value '" + text + "' for " + name + " (expected one character)");
      }
    } else if constexpr (std::is_same_v<T, data::SynthKind>) {
      try {
        v = data::parse_synth_kind(text);
      } catch (const std::exception &) {
        throw ConfigError("invalid value '" + text + "' for " + name + " (expected highway or roundabout)");
      }
    } else {
      v = parse_number<T>(text, name);
    }
  };
  return k;
}

#define SSMTRAJ_KEY(section, name, expr) \
  {std::string(section) + "." + name, bind([](RunConfig & c) -> auto & { return expr; })}

// Ordered as written by write_run_config.
const std::vector<std::pair<std::string, Key>> & keys()
{
  static const std::vector<std::pair<std::string, Key>> table{
    SSMTRAJ_KEY("run", "seed", c.seed),
    SSMTRAJ_KEY("synth", "kind", c.synth.kind),
    SSMTRAJ_KEY("synth", "scenes", c.synth.scenes),
    SSMTRAJ_KEY("synth", "agents", c.synth.agents),
    SSMTRAJ_KEY("synth", "noise", c.synth.noise_std),
    SSMTRAJ_KEY("synth", "frames", c.synth.frames),
    SSMTRAJ_KEY("synth", "frame_rate", c.synth.frame_rate),
    SSMTRAJ_KEY("synth", "max_accel", c.synth.max_accel),
    SSMTRAJ_KEY("synth", "speed", c.synth.speed),
    SSMTRAJ_KEY("synth", "radius", c.synth.radius),
    SSMTRAJ_KEY("windows", "observed", c.windows.observed),
    SSMTRAJ_KEY("windows", "horizon", c.windows.horizon),
    SSMTRAJ_KEY("windows", "stride", c.windows.stride),
    SSMTRAJ_KEY("windows", "downsample", c.windows.downsample),
    SSMTRAJ_KEY("windows", "graph_radius", c.windows.radius),
    SSMTRAJ_KEY("ingest", "frame", c.schema.frame),
    SSMTRAJ_KEY("ingest", "id", c.schema.id),
    SSMTRAJ_KEY("ingest", "x", c.schema.x),
    SSMTRAJ_KEY("ingest", "y", c.schema.y),
    SSMTRAJ_KEY("ingest", "vx", c.schema.vx),
    SSMTRAJ_KEY("ingest", "vy", c.schema.vy),
    SSMTRAJ_KEY("ingest", "recording", c.schema.recording),
    SSMTRAJ_KEY("ingest", "delimiter", c.schema.delimiter),
    SSMTRAJ_KEY("ingest", "frame_rate", c.schema.frame_rate),
    SSMTRAJ_KEY("model", "mixed_mamba", c.model.mixed_mamba),
    SSMTRAJ_KEY("model", "graph_considered", c.model.graph_considered),
    SSMTRAJ_KEY("model", "linear_koopman", c.model.linear_koopman),
    SSMTRAJ_KEY("model", "mamba_state", c.model.mamba_state),
    SSMTRAJ_KEY("model", "mamba_conv", c.model.mamba_conv),
    SSMTRAJ_KEY("model", "mamba_expansion", c.model.mamba_expansion),
    SSMTRAJ_KEY("model", "gat_heads", c.model.gat_heads),
    SSMTRAJ_KEY("model", "gat_att_dim", c.model.gat_att_dim),
    SSMTRAJ_KEY("model", "gat_head_dim", c.model.gat_head_dim),
    SSMTRAJ_KEY("model", "control_dim", c.model.control_dim),
    SSMTRAJ_KEY("model", "koopman_hidden", c.model.koopman_hidden),
    SSMTRAJ_KEY("model", "koopman_layers", c.model.koopman_layers),
    SSMTRAJ_KEY("model", "koopman_features", c.model.koopman_features),
    SSMTRAJ_KEY("model", "dt", c.model.dt),
    SSMTRAJ_KEY("model", "q_init", c.model.q_init),
    SSMTRAJ_KEY("model", "decoder_hidden", c.model.decoder_hidden),
    SSMTRAJ_KEY("model", "decoder_state_features", c.model.decoder_state_features),
    SSMTRAJ_KEY("model", "pos_scale", c.model.pos_scale),
    SSMTRAJ_KEY("model", "vel_scale", c.model.vel_scale),
    SSMTRAJ_KEY("model", "radius", c.model.radius),
    SSMTRAJ_KEY("train", "w_nll", c.model.w_nll),
    SSMTRAJ_KEY("train", "w_pos", c.model.w_pos),
    SSMTRAJ_KEY("train", "w_dyn", c.model.w_dyn),
    SSMTRAJ_KEY("train", "learning_rate", c.model.learning_rate),
    SSMTRAJ_KEY("train", "beta1", c.model.beta1),
    SSMTRAJ_KEY("train", "beta2", c.model.beta2),
    SSMTRAJ_KEY("train", "weight_decay", c.model.weight_decay),
    SSMTRAJ_KEY("train", "clip_norm", c.model.clip_norm),
    SSMTRAJ_KEY("train", "epochs", c.model.epochs),
    SSMTRAJ_KEY("train", "batch_size", c.model.batch_size),
    SSMTRAJ_KEY("train", "target_val_ade", c.target_val_ade),
    SSMTRAJ_KEY("train", "split_train", c.split[0]),
    SSMTRAJ_KEY("train", "split_validation", c.split[1]),
    SSMTRAJ_KEY("train", "split_test", c.split[2]),
  };
  return table;
}

#undef SSMTRAJ_KEY

const Key * find_key(const std::string & dotted)
{
  for (const auto & [name, key] : keys()) {
    if (name == dotted) {
      return &key;
    }
  }
  return nullptr;
}

}  // namespace

void RunConfig::propagate_seed()
{
  synth.seed = seed;
  model.seed = seed;
}

void RunConfig::validate() const
{
  try {
    model.validate();
  } catch (const std::exception & e) {
    throw ConfigError(e.what());
  }
  if (windows.observed < 2 || windows.horizon < 1) {
    throw ConfigError("windows: observed must be >= 2 and horizon >= 1");
  }
  if (windows.stride < 1 || windows.downsample < 1) {
    throw ConfigError("windows: stride and downsample must be >= 1");
  }
  if (synth.agents < 1) {
    throw ConfigError("synth: agents must be >= 1");
  }
  if (!(synth.frame_rate > 0.0) || !(schema.frame_rate > 0.0)) {
    throw ConfigError("frame rates must be positive");
  }
  const double total = split[0] + split[1] + split[2];
  if (split[0] < 0.0 || split[1] < 0.0 || split[2] < 0.0 || std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("train: split fractions must be non-negative and sum to 1");
  }
  if (target_val_ade < 0.0) {
    throw ConfigError("train: target_val_ade must be >= 0");
  }
}

RunConfig read_run_config(std::istream & in, RunConfig base)
{
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error & e) {
    throw ConfigError("config: " + e.message() + " at line " + std::to_string(e.line()));
  }
  for (const auto & [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw ConfigError("config: key '" + section + "' is outside any section");
    }
    for (const auto & [key, value] : entries) {
      const std::string dotted = section + "." + key;
      const Key * k = find_key(dotted);
      if (k == nullptr) {
        throw ConfigError("config: unknown key '" + dotted + "'");
      }
      k->set(base, value.data(), dotted);
    }
  }
  return base;
}

RunConfig read_run_config(const std::filesystem::path & path, RunConfig base)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config " + path.string());
  }
  return read_run_config(in, std::move(base));
}

void write_run_config(std::ostream & out, const RunConfig & config)
{
  std::string section;
  for (const auto & [dotted, key] : keys()) {
    const auto dot = dotted.find('.');
    const std::string s = dotted.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    out << dotted.substr(dot + 1) << " = " << key.get(config) << '\n';
  }
}

void write_run_config(const std::filesystem::path & path, const RunConfig & config)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_run_config(out, config);
}

}  // namespace ssmtraj::cli
