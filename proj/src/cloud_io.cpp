// Copyright 2026 The segcalib Authors
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

#include "segcalib/cloud_io.hpp"

#include "segcalib/errors.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace segcalib
{

namespace
{

float read_le_float(const char * bytes)
{
  std::uint32_t raw;
  std::memcpy(&raw, bytes, sizeof(raw));
  if constexpr (std::endian::native == std::endian::big) {
    raw = ((raw & 0xFFu) << 24) | ((raw & 0xFF00u) << 8) | ((raw >> 8) & 0xFF00u) | (raw >> 24);
  }
  float value;
  std::memcpy(&value, &raw, sizeof(value));
  return value;
}

void write_le_float(std::ostream & out, float value)
{
  std::uint32_t raw;
  std::memcpy(&raw, &value, sizeof(raw));
  if constexpr (std::endian::native == std::endian::big) {
    raw = ((raw & 0xFFu) << 24) | ((raw & 0xFF00u) << 8) | ((raw >> 8) & 0xFF00u) | (raw >> 24);
  }
  std::array<char, 4> bytes;
  std::memcpy(bytes.data(), &raw, sizeof(raw));
  out.write(bytes.data(), bytes.size());
}

double parse_double(const std::string & token, const std::filesystem::path & path)
{
  double value = 0.0;
  const auto * end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw IoError(path.string() + ": malformed number '" + token + "'");
  }
  return value;
}

std::string format_double(double value)
{
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace

CloudFile load_cloud_bin(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open point cloud " + path.string());
  }
  const std::vector<char> bytes(
    (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t kStride = 4 * sizeof(float);
  if (bytes.size() % kStride != 0) {
    throw IoError(path.string() + ": size is not a multiple of 16 bytes");
  }
  CloudFile file;
  file.cloud.source_path = path.string();
  file.cloud.points.reserve(bytes.size() / kStride);
  for (std::size_t off = 0; off < bytes.size(); off += kStride) {
    Point p;
    p.position = Eigen::Vector3d(
      read_le_float(&bytes[off]), read_le_float(&bytes[off + 4]), read_le_float(&bytes[off + 8]));
    p.reflectivity = read_le_float(&bytes[off + 12]);
    file.cloud.points.push_back(p);
  }
  return file;
}

CloudFile load_cloud_pcd(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open point cloud " + path.string());
  }
  std::vector<std::string> fields;
  long declared_points = -1;
  std::string line;
  bool in_data = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "FIELDS") {
      std::string f;
      while (ls >> f) {
        fields.push_back(f);
      }
    } else if (key == "POINTS") {
      ls >> declared_points;
    } else if (key == "DATA") {
      std::string mode;
      ls >> mode;
      if (mode != "ascii") {
        throw IoError(path.string() + ": only DATA ascii is supported");
      }
      in_data = true;
      break;
    }
  }
  if (!in_data) {
    throw IoError(path.string() + ": missing DATA line");
  }

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    column[fields[i]] = i;
  }
  for (const char * required : {"x", "y", "z", "intensity"}) {
    if (!column.count(required)) {
      throw IoError(path.string() + ": FIELDS lacks '" + required + "'");
    }
  }
  CloudFile file;
  file.has_normals =
    column.count("normal_x") && column.count("normal_y") && column.count("normal_z");
  file.has_labels = column.count("label") > 0;
  file.cloud.source_path = path.string();
  if (declared_points > 0) {
    file.cloud.points.reserve(static_cast<std::size_t>(declared_points));
  }

  std::vector<std::string> tokens;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    tokens.clear();
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      tokens.push_back(tok);
    }
    if (tokens.size() != fields.size()) {
      throw IoError(path.string() + ": row has wrong column count");
    }
    auto get = [&](const char * name) { return parse_double(tokens[column.at(name)], path); };
    Point p;
    p.position = Eigen::Vector3d(get("x"), get("y"), get("z"));
    p.reflectivity = get("intensity");
    if (file.has_normals) {
      p.normal = Eigen::Vector3d(get("normal_x"), get("normal_y"), get("normal_z"));
    }
    if (file.has_labels) {
      p.label = static_cast<int>(get("label"));
    }
    file.cloud.points.push_back(p);
  }
  if (declared_points >= 0 && static_cast<std::size_t>(declared_points) != file.cloud.size()) {
    throw IoError(path.string() + ": POINTS does not match the number of rows");
  }
  return file;
}

CloudFile load_cloud(const std::filesystem::path & path)
{
  if (path.extension() == ".bin") {
    return load_cloud_bin(path);
  }
  return load_cloud_pcd(path);
}

void save_cloud_bin(const PointCloud & cloud, const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  for (const auto & p : cloud.points) {
    write_le_float(out, static_cast<float>(p.position.x()));
    write_le_float(out, static_cast<float>(p.position.y()));
    write_le_float(out, static_cast<float>(p.position.z()));
    write_le_float(out, static_cast<float>(p.reflectivity));
  }
}

void save_cloud_pcd(const PointCloud & cloud, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  const std::size_t n = cloud.size();
  out << "# .PCD v0.7 - Point Cloud Data file format\n"
      << "VERSION 0.7\n"
      << "FIELDS x y z intensity normal_x normal_y normal_z label\n"
      << "SIZE 8 8 8 8 8 8 8 4\n"
      << "TYPE F F F F F F F I\n"
      << "COUNT 1 1 1 1 1 1 1 1\n"
      << "WIDTH " << n << "\n"
      << "HEIGHT 1\n"
      << "VIEWPOINT 0 0 0 1 0 0 0\n"
      << "POINTS " << n << "\n"
      << "DATA ascii\n";
  for (const auto & p : cloud.points) {
    out << format_double(p.position.x()) << ' ' << format_double(p.position.y()) << ' '
        << format_double(p.position.z()) << ' ' << format_double(p.reflectivity) << ' '
        << format_double(p.normal.x()) << ' ' << format_double(p.normal.y()) << ' '
        << format_double(p.normal.z()) << ' ' << p.label << '\n';
  }
}

}  // namespace segcalib
