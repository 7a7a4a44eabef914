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

#include "dwb/mst.hpp"

#include "dwb/error.hpp"

#include <cmath>
#include <limits>

namespace dwb::mst {

std::vector<Edge> euclidean_mst(std::span<const double> coords, std::size_t dim) {
  if (dim == 0 || coords.size() % dim != 0) {
    throw ShapeError("coordinate buffer is not a whole number of points");
  }
  const std::size_t n = coords.size() / dim;
  std::vector<Edge> edges;
  if (n < 2) {
    return edges;
  }
  edges.reserve(n - 1);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n, inf);
  std::vector<std::size_t> parent(n, 0);
  std::vector<char> in_tree(n, 0);

  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    const double* p = coords.data() + current * dim;
    std::size_t next = n;
    double next_d = inf;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) {
        continue;
      }
      const double* q = coords.data() + v * dim;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double t = p[k] - q[k];
        d2 += t * t;
      }
      if (d2 < best[v]) {
        best[v] = d2;
        parent[v] = current;
      }
      if (best[v] < next_d) {
        next_d = best[v];
        next = v;
      }
    }
    in_tree[next] = 1;
    edges.push_back({parent[next], next, std::sqrt(next_d)});
    current = next;
  }
  return edges;
}

double euclidean_mst_length(std::span<const double> coords, std::size_t dim) {
  double total = 0.0;
  for (const Edge& e : euclidean_mst(coords, dim)) {
    total += e.length;
  }
  return total;
}

std::int64_t manhattan_mst_steps(std::span<const GridPoint> points) {
  const std::size_t n = points.size();
  if (n < 2) {
    return 0;
  }
  constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> best(n, inf);
  std::vector<char> in_tree(n, 0);
  std::size_t current = 0;
  in_tree[0] = 1;
  std::int64_t total = 0;
  for (std::size_t step = 1; step < n; ++step) {
    const GridPoint p = points[current];
    std::size_t next = n;
    std::int64_t next_d = inf;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) {
        continue;
      }
      const std::int64_t d = manhattan(p, points[v]);
      if (d < best[v]) {
        best[v] = d;
      }
      if (best[v] < next_d) {
        next_d = best[v];
        next = v;
      }
    }
    in_tree[next] = 1;
    total += next_d;
    current = next;
  }
  return total;
}

} // namespace dwb::mst
