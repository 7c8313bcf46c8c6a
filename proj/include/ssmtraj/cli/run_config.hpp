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

#ifndef SSMTRAJ_CLI_RUN_CONFIG_HPP_
#define SSMTRAJ_CLI_RUN_CONFIG_HPP_

#include "ssmtraj/data/ingest.hpp"
#include "ssmtraj/data/synth.hpp"
#include "ssmtraj/data/windows.hpp"
#include "ssmtraj/training/config.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace ssmtraj::cli
{

/// Bad flag values, unknown keys and malformed config files; exit code 2.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/**
 * Everything a command reads besides its input files. Serialized as an INI
 * file with sections [run], [synth], [windows], [ingest], [model] and
 * [train]. The single run seed drives generation, the split and the model.
 */
struct RunConfig
{
  std::uint64_t seed{0};
  data::SynthOptions synth;
  data::WindowOptions windows{15, 25, 200, 5, 30.0};
  data::TableSchema schema;
  training::ModelConfig model;
  std::array<double, 3> split{0.8, 0.1, 0.1};
  /// early-stop threshold on validation ADE, meters; 0 disables it
  double target_val_ade{0.0};

  /// Copies `seed` into the components that consume it.
  void propagate_seed();
  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Applies the keys found in `in` on top of `base`; unknown sections or keys throw ConfigError.
RunConfig read_run_config(std::istream & in, RunConfig base = {});
RunConfig read_run_config(const std::filesystem::path & path, RunConfig base = {});

/// Every key, with doubles in shortest round-trip form.
void write_run_config(std::ostream & out, const RunConfig & config);
void write_run_config(const std::filesystem::path & path, const RunConfig & config);

inline constexpr const char * kResolvedConfigName = "resolved.cfg";

}  // namespace ssmtraj::cli

#endif  // SSMTRAJ_CLI_RUN_CONFIG_HPP_
