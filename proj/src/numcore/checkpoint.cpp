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

#include "ssmtraj/numcore/checkpoint.hpp"

#include "ssmtraj/numcore/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace ssmtraj::numcore
{

namespace wire
{

void put_u32(std::vector<std::uint8_t> & out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_u64(std::vector<std::uint8_t> & out, std::uint64_t v)
{
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_i64(std::vector<std::uint8_t> & out, std::int64_t v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_f64(std::vector<std::uint8_t> & out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void Reader::need(std::size_t n) const
{
  if (pos_ + n > bytes_.size()) {
    throw FormatError("unexpected end of data");
  }
}

std::uint32_t Reader::u32()
{
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
  }
  return v;
}

std::uint64_t Reader::u64()
{
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
  }
  return v;
}

std::int64_t Reader::i64() { return std::bit_cast<std::int64_t>(u64()); }

double Reader::f64() { return std::bit_cast<double>(u64()); }

std::string Reader::bytes(std::size_t n)
{
  need(n);
  std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return s;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path & path, const std::vector<std::uint8_t> & bytes)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw FormatError("write failed for " + path.string());
  }
}

}  // namespace wire

std::vector<std::uint8_t> encode_checkpoint(const ParameterList & params)
{
  std::vector<std::uint8_t> out(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  wire::put_u32(out, kCheckpointVersion);
  for (const auto & [name, tensor] : params) {
    wire::put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    wire::put_u32(out, static_cast<std::uint32_t>(tensor.rank()));
    for (const auto extent : tensor.shape()) {
      wire::put_u64(out, extent);
    }
    for (const double v : tensor.values()) {
      wire::put_f64(out, v);
    }
  }
  return out;
}

ParameterList decode_checkpoint(const std::vector<std::uint8_t> & bytes)
{
  wire::Reader in(bytes);
  if (in.bytes(4) != std::string(kCheckpointMagic, 4)) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const auto version = in.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  ParameterList params;
  while (!in.at_end()) {
    const auto name_len = in.u32();
    std::string name = in.bytes(name_len);
    const auto rank = in.u32();
    Shape shape(rank);
    for (auto & extent : shape) {
      extent = static_cast<std::size_t>(in.u64());
    }
    std::vector<double> values(shape_numel(shape));
    for (auto & v : values) {
      v = in.f64();
    }
    params.push_back({std::move(name), Tensor(std::move(shape), std::move(values))});
  }
  return params;
}

void save_checkpoint(const std::filesystem::path & path, const ParameterList & params)
{
  wire::write_file(path, encode_checkpoint(params));
}

ParameterList load_checkpoint(const std::filesystem::path & path)
{
  return decode_checkpoint(wire::read_file(path));
}

void restore_parameters(ParameterList & params, const ParameterList & stored)
{
  if (params.size() != stored.size()) {
    throw FormatError(
      "checkpoint holds " + std::to_string(stored.size()) + " tensors, model expects " +
      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto & target = params[i];
    const auto & source = stored[i];
    if (target.name != source.name || target.tensor.shape() != source.tensor.shape()) {
      throw FormatError(
        "checkpoint entry " + source.name + shape_to_string(source.tensor.shape()) +
        " does not match model parameter " + target.name + shape_to_string(target.tensor.shape()));
    }
    const auto src = source.tensor.values();
    auto dst = target.tensor.mutable_values();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

}  // namespace ssmtraj::numcore
