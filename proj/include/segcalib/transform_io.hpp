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

#pragma once

#include "segcalib/types.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace segcalib
{

/// {"T": 4x4 row-major, "K": 3x3 row-major, "width": W, "height": H}; either part may be absent.
struct TransformDoc
{
  std::optional<Extrinsic> extrinsic;
  std::optional<Intrinsics> intrinsics;
};

TransformDoc parse_transform_doc(const std::string & text);
TransformDoc load_transform_doc(const std::filesystem::path & path);
std::string encode_transform_doc(const TransformDoc & doc);
void save_transform_doc(const TransformDoc & doc, const std::filesystem::path & path);

}  // namespace segcalib
