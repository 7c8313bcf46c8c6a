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

#ifndef SSMTRAJ_NUMCORE_CHECKPOINT_HPP_
#define SSMTRAJ_NUMCORE_CHECKPOINT_HPP_

#include "ssmtraj/numcore/layers.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ssmtraj::numcore
{

// Layout (all integers little-endian):
//   "SSMT"  u32 version
//   repeated until end of file:
//     u32 name_length, name bytes (UTF-8),
//     u32 rank, u64 extent * rank,
//     f64 value * prod(extents)
inline constexpr char kCheckpointMagic[4] = {'S', 'S', 'M', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const ParameterList & params);
/// Decoded entries are fresh untracked tensors.
ParameterList decode_checkpoint(const std::vector<std::uint8_t> & bytes);

void save_checkpoint(const std::filesystem::path & path, const ParameterList & params);
ParameterList load_checkpoint(const std::filesystem::path & path);

/**
 * Copies checkpoint values into existing parameter tensors. Names, order and
 * shapes must match exactly.
 */
void restore_parameters(ParameterList & params, const ParameterList & stored);

// Little-endian primitives shared with the processed-data container.
namespace wire
{
void put_u32(std::vector<std::uint8_t> & out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t> & out, std::uint64_t v);
void put_i64(std::vector<std::uint8_t> & out, std::int64_t v);
void put_f64(std::vector<std::uint8_t> & out, double v);

class Reader
{
public:
  explicit Reader(const std::vector<std::uint8_t> & bytes) : bytes_(bytes) {}
  bool at_end() const { return pos_ >= bytes_.size(); }
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  std::string bytes(std::size_t n);

private:
  void need(std::size_t n) const;
  const std::vector<std::uint8_t> & bytes_;
  std::size_t pos_{0};
};

std::vector<std::uint8_t> read_file(const std::filesystem::path & path);
void write_file(const std::filesystem::path & path, const std::vector<std::uint8_t> & bytes);
}  // namespace wire

}  // namespace ssmtraj::numcore

#endif  // SSMTRAJ_NUMCORE_CHECKPOINT_HPP_
