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


#ifndef SSMTRAJ_DATA_INGEST_HPP_
#define SSMTRAJ_DATA_INGEST_HPP_

#include "ssmtraj/data/scene.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssmtraj::data
{

/// Column names of a delimited track table. Defaults follow the highD tracks layout.
struct TableSchema
{
  std::string frame{"frame"};
  std::string id{"id"};
  std::string x{"x"};
  std::string y{"y"};
  std::string vx{"xVelocity"};
  std::string vy{"yVelocity"};
  /// Optional; when the column is absent every row belongs to `scene_id`.
  std::string recording{"recordingId"};
  char delimiter{','};
  double frame_rate{25.0};
  std::int64_t scene_id{0};
};

/**
 * Parses a table with a header row. Scenes come out ordered by recording id,
 * tracks by agent id and points by frame. Throws FormatError naming a
 * missing column, or giving the line number of a malformed row.
 */
std::vector<Scene> ingest_table(std::istream & in, const TableSchema & schema = {});
std::vector<Scene> ingest_table(const std::filesystem::path & path, const TableSchema & schema = {});

/// Writes scenes in the default layout, recording column included.
void write_table(std::ostream & out, const std::vector<Scene> & scenes);

}  // namespace ssmtraj::data

#endif  // SSMTRAJ_DATA_INGEST_HPP_
