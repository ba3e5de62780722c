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

#include "segcalib/transform_io.hpp"

#include "segcalib/errors.hpp"

#include "json.hpp"

#include <fstream>
#include <iterator>

namespace segcalib
{

namespace
{

using ordered_json = nlohmann::ordered_json;

template <int Rows, int Cols>
Eigen::Matrix<double, Rows, Cols> read_matrix(const ordered_json & j, const char * name)
{
  if (!j.is_array() || j.size() != Rows) {
    throw IoError(std::string("'") + name + "' must have " + std::to_string(Rows) + " rows");
  }
  Eigen::Matrix<double, Rows, Cols> m;
  for (int r = 0; r < Rows; ++r) {
    const auto & row = j[r];
    if (!row.is_array() || row.size() != Cols) {
      throw IoError(std::string("'") + name + "' rows must have " + std::to_string(Cols) + " entries");
    }
    for (int c = 0; c < Cols; ++c) {
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

template <typename Derived>
ordered_json write_matrix(const Eigen::MatrixBase<Derived> & m)
{
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TransformDoc parse_transform_doc(const std::string & text)
{
  TransformDoc doc;
  try {
    const ordered_json j = ordered_json::parse(text);
    if (!j.is_object()) {
      throw IoError("transform document must be an object");
    }
    for (const auto & [key, value] : j.items()) {
      if (key != "T" && key != "K" && key != "width" && key != "height") {
        throw IoError("unknown key '" + key + "' in transform document");
      }
    }
    if (j.contains("T")) {
      doc.extrinsic = Extrinsic::from_matrix(read_matrix<4, 4>(j["T"], "T"));
    }
    if (j.contains("K")) {
      if (!j.contains("width") || !j.contains("height")) {
        throw IoError("'K' requires 'width' and 'height'");
      }
      doc.intrinsics =
        Intrinsics(read_matrix<3, 3>(j["K"], "K"), j["width"].get<int>(), j["height"].get<int>());
    }
  } catch (const nlohmann::json::exception & e) {
    throw IoError(std::string("malformed transform document: ") + e.what());
  } catch (const std::invalid_argument & e) {
    throw IoError(std::string("invalid transform document: ") + e.what());
  }
  return doc;
}

TransformDoc load_transform_doc(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return parse_transform_doc(
    std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
}

std::string encode_transform_doc(const TransformDoc & doc)
{
  ordered_json j = ordered_json::object();
  if (doc.extrinsic) {
    j["T"] = write_matrix(doc.extrinsic->matrix());
  }
  if (doc.intrinsics) {
    j["K"] = write_matrix(doc.intrinsics->k());
    j["width"] = doc.intrinsics->width();
    j["height"] = doc.intrinsics->height();
  }
  return j.dump(2) + "\n";
}

void save_transform_doc(const TransformDoc & doc, const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << encode_transform_doc(doc);
}

}  // namespace segcalib
