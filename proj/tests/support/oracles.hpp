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

// Independent reference implementations used to cross-check the library.
// They favour obviousness over speed and share no code with dwb_core.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace dwb::oracle {

/// Sum of Manhattan distances from every PE of an n x n grid to PE (0, 0).
std::uint64_t corner_distance_sum(std::uint64_t n);

/// Kruskal over all pairs with union-find; points are (row, col).
std::int64_t kruskal_manhattan(std::span<const std::pair<std::int64_t, std::int64_t>> points);

/// Kruskal over all pairs under Euclidean distance; coords row-major.
double kruskal_euclidean(std::span<const double> coords, std::size_t dim);

/// Minimum over every labelled spanning tree (Pruefer enumeration). n <= 8.
double exhaustive_mst_euclidean(std::span<const double> coords, std::size_t dim);

/// Plain-loop dendritic layer: outputs[i] = sum_k act(w_(iK+k) . x + b_(iK+k)).
std::vector<double> naive_dendritic_forward(std::span<const double> x,
                                            std::span<const double> weights_row_major,
                                            std::span<const double> biases, std::size_t n_neurons,
                                            std::size_t K, double negative_slope);

/// Shannon entropy in bits of a probability map, summed in key order.
double entropy_bits(const std::map<double, double>& pmf);

/// Pushforward of a joint pmf through the component sum, by direct enumeration.
std::map<double, double> sum_pushforward(const std::vector<std::vector<double>>& tuples,
                                         std::span<const double> probs);

/// Element reads of a block schedule with no cache, counted from first principles:
/// every (block-row, block-col) output tile reads its A panel and B panel once.
std::uint64_t uncached_reads(std::uint64_t m, std::uint64_t n, std::uint64_t l,
                             std::uint64_t B_M, std::uint64_t B_N);

} // namespace dwb::oracle
