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

#include "segcalib/kd_index.hpp"

#include <algorithm>
#include <numeric>

namespace segcalib
{

namespace
{

constexpr std::size_t kLeafSize = 10;

bool closer(const Neighbor & a, const Neighbor & b)
{
  return a.sq_distance < b.sq_distance || (a.sq_distance == b.sq_distance && a.index < b.index);
}

}  // namespace

KdIndex::KdIndex(std::vector<Eigen::Vector3d> positions) : positions_(std::move(positions))
{
  order_.resize(positions_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!positions_.empty()) {
    nodes_.reserve(2 * positions_.size() / kLeafSize + 1);
    build(0, positions_.size());
  }
}

int KdIndex::build(std::size_t begin, std::size_t end)
{
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) {
    return id;
  }
  Eigen::Vector3d lo = positions_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(positions_[order_[i]]);
    hi = hi.cwiseMax(positions_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(
    order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
    [&](std::size_t a, std::size_t b) {
      const double pa = positions_[a][axis];
      const double pb = positions_[b][axis];
      return pa < pb || (pa == pb && a < b);
    });
  const double split = positions_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<Neighbor> KdIndex::knn(const Eigen::Vector3d & query, std::size_t k) const
{
  std::vector<Neighbor> heap;
  k = std::min(k, positions_.size());
  if (k == 0) {
    return heap;
  }
  heap.reserve(k + 1);
  knn_recurse(0, query, k, heap);
  std::sort_heap(heap.begin(), heap.end(), closer);
  return heap;
}

void KdIndex::knn_recurse(
  int node_id, const Eigen::Vector3d & query, std::size_t k, std::vector<Neighbor> & heap) const
{
  const Node & node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      const Neighbor cand{idx, (positions_[idx] - query).squaredNorm()};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), closer);
      } else if (closer(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), closer);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), closer);
      }
    }
    return;
  }
  const double diff = query[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  knn_recurse(near, query, k, heap);
  // <= so equal-distance candidates on the far side can still win the index tie-break
  if (heap.size() < k || diff * diff <= heap.front().sq_distance) {
    knn_recurse(far, query, k, heap);
  }
}

std::vector<std::size_t> KdIndex::radius(const Eigen::Vector3d & query, double radius) const
{
  std::vector<std::size_t> out;
  if (!positions_.empty()) {
    radius_recurse(0, query, radius * radius, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void KdIndex::radius_recurse(
  int node_id, const Eigen::Vector3d & query, double sq_radius,
  std::vector<std::size_t> & out) const
{
  const Node & node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      if ((positions_[idx] - query).squaredNorm() <= sq_radius) {
        out.push_back(idx);
      }
    }
    return;
  }
  const double diff = query[node.axis] - node.split;
  if (diff <= 0.0 || diff * diff <= sq_radius) {
    radius_recurse(node.left, query, sq_radius, out);
  }
  if (diff >= 0.0 || diff * diff <= sq_radius) {
    radius_recurse(node.right, query, sq_radius, out);
  }
}

}  // namespace segcalib
