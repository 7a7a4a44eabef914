/*
 * Copyright 2026 The Dendrite Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dwb::mst {

struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
};

/// Exact Euclidean minimum spanning tree by dense Prim, O(n^2) distance
/// evaluations. `coords` holds n points of `dim` coordinates each, packed
/// row-major. Edges are returned in the order Prim attaches them.
std::vector<Edge> euclidean_mst(std::span<const double> coords, std::size_t dim);

/// Total length of euclidean_mst(coords, dim).
double euclidean_mst_length(std::span<const double> coords, std::size_t dim);

struct GridPoint {
  std::int64_t row = 0;
  std::int64_t col = 0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

inline std::int64_t manhattan(const GridPoint& a, const GridPoint& b) noexcept {
  const std::int64_t dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  const std::int64_t dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  return dr + dc;
}

/// Rectilinear minimum spanning tree length in integer grid steps (dense
/// Prim under the Manhattan metric, no Steiner points).
std::int64_t manhattan_mst_steps(std::span<const GridPoint> points);

} // namespace dwb::mst
