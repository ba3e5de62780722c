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

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace segcalib
{

struct Neighbor
{
  std::size_t index;
  double sq_distance;
};

/// Balanced 3-d tree over point positions. Read-only after construction.
class KdIndex
{
public:
  explicit KdIndex(std::vector<Eigen::Vector3d> positions);

  /// Exactly min(k, size()) neighbors sorted by ascending distance (ties by ascending index).
  std::vector<Neighbor> knn(const Eigen::Vector3d & query, std::size_t k) const;

  /// Indices within `radius` of `query` (inclusive), sorted ascending.
  std::vector<std::size_t> radius(const Eigen::Vector3d & query, double radius) const;

  std::size_t size() const { return positions_.size(); }
  const Eigen::Vector3d & position(std::size_t i) const { return positions_[i]; }

private:
  struct Node
  {
    std::size_t begin;
    std::size_t end;
    int axis;  // -1 for leaves
    double split;
    int left;
    int right;
  };

  int build(std::size_t begin, std::size_t end);
  void knn_recurse(
    int node, const Eigen::Vector3d & query, std::size_t k, std::vector<Neighbor> & heap) const;
  void radius_recurse(
    int node, const Eigen::Vector3d & query, double sq_radius,
    std::vector<std::size_t> & out) const;

  std::vector<Eigen::Vector3d> positions_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace segcalib
