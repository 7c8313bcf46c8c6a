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


#include "ssmtraj/data/ingest.hpp"

#include "ssmtraj/numcore/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string_view>

namespace ssmtraj::data
{

namespace
{

std::vector<std::string_view> split_line(std::string_view line, char delim)
{
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(delim, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) {
      break;
    }
    start = end + 1;
  }
  return out;
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse(std::string_view field, std::size_t line, const std::string & column)
{
  field = trim(field);
  T value{};
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size() || field.empty()) {
    throw FormatError(
      "line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "' in column " + column);
  }
  return value;
}

}  // namespace

std::vector<Scene> ingest_table(std::istream & in, const TableSchema & schema)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("table is empty: missing header row");
  }
  const auto header = split_line(line, schema.delimiter);
  auto find = [&](const std::string & name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) {
        return i;
      }
    }
    return std::nullopt;
  };
  auto need = [&](const std::string & name) {
    const auto i = find(name);
    if (!i) {
      throw FormatError("table has no column '" + name + "'");
    }
    return *i;
  };
  const std::size_t c_frame = need(schema.frame);
  const std::size_t c_id = need(schema.id);
  const std::size_t c_x = need(schema.x);
  const std::size_t c_y = need(schema.y);
  const std::size_t c_vx = need(schema.vx);
  const std::size_t c_vy = need(schema.vy);
  const auto c_rec = schema.recording.empty() ? std::nullopt : find(schema.recording);

  std::map<std::int64_t, std::map<std::int64_t, std::vector<TrackPoint>>> grouped;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line) == "\r") {
      continue;
    }
    const auto f = split_line(line, schema.delimiter);
    if (f.size() != header.size()) {
      throw FormatError(
        "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields, found " +
        std::to_string(f.size()));
    }
    TrackPoint p;
    p.frame = parse<std::int64_t>(f[c_frame], line_no, schema.frame);
    const auto id = parse<std::int64_t>(f[c_id], line_no, schema.id);
    p.state = {
      parse<double>(f[c_x], line_no, schema.x), parse<double>(f[c_y], line_no, schema.y),
      parse<double>(f[c_vx], line_no, schema.vx), parse<double>(f[c_vy], line_no, schema.vy)};
    const auto rec = c_rec ? parse<std::int64_t>(f[*c_rec], line_no, schema.recording) : schema.scene_id;
    grouped[rec][id].push_back(p);
  }

  std::vector<Scene> scenes;
  for (auto & [rec, tracks] : grouped) {
    Scene s;
    s.scene_id = rec;
    s.frame_rate = schema.frame_rate;
    for (auto & [id, points] : tracks) {
      std::stable_sort(points.begin(), points.end(), [](const auto & a, const auto & b) { return a.frame < b.frame; });
      for (std::size_t k = 1; k < points.size(); ++k) {
        if (points[k].frame == points[k - 1].frame) {
          throw FormatError(
            "recording " + std::to_string(rec) + ": agent " + std::to_string(id) + " has frame " +
            std::to_string(points[k].frame) + " twice");
        }
      }
      s.tracks.push_back({id, std::move(points)});
    }
    validate(s);
    scenes.push_back(std::move(s));
  }
  return scenes;
}

std::vector<Scene> ingest_table(const std::filesystem::path & path, const TableSchema & schema)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return ingest_table(in, schema);
}

void write_table(std::ostream & out, const std::vector<Scene> & scenes)
{
  out << "recordingId,frame,id,x,y,xVelocity,yVelocity\n";
  char buf[32];
  auto put = [&](double v) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, end - buf);
  };
  for (const auto & s : scenes) {
    for (const auto & t : s.tracks) {
      for (const auto & p : t.points) {
        out << s.scene_id << ',' << p.frame << ',' << t.id << ',';
        put(p.state.x);
        out << ',';
        put(p.state.y);
        out << ',';
        put(p.state.vx);
        out << ',';
        put(p.state.vy);
        out << '\n';
      }
    }
  }
}

}  // namespace ssmtraj::data
