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

#include "dwb/csv.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace dwb::mesh {

/// A layer of width D mapped onto a unit-square mesh of processing
/// elements, with K dendrites per neuron. The baseline mesh is an N x N grid
/// of pitch l = 1/N; the dendritic mesh holds M = D sqrt(K) PEs of pitch
/// l_hat = 1/sqrt(M) serving D_hat = D / sqrt(K) neurons.
class MeshConfig {
public:
  /// D must be a perfect square, K >= 1 and sqrt(K) <= D.
  MeshConfig(std::uint64_t D, std::uint64_t K);

  std::uint64_t D() const noexcept { return d_; }
  std::uint64_t K() const noexcept { return k_; }
  double N() const noexcept;
  double l() const noexcept;
  double M() const noexcept;
  double l_hat() const noexcept;
  double D_hat() const noexcept;
  double N_hat() const noexcept;

  /// True when N, N_hat and sqrt(M) are all integers, so the dendritic
  /// layout can be realized as whole PEs on a square grid.
  bool grid_realizable() const noexcept;

private:
  std::uint64_t d_;
  std::uint64_t k_;
};

/// C_A = D - sqrt(D). D must be a perfect square.
double aggregation_cost_point(std::uint64_t D);
/// C_E = (D - 1) sqrt(D). D must be a perfect square.
double delivery_cost_point(std::uint64_t D);

struct AggregationSplit {
  double gather = 0.0;    ///< C^_AG
  double aggregate = 0.0; ///< C^_AA
};

AggregationSplit dendritic_aggregation_cost(const MeshConfig& cfg);
/// Upper bounds sqrt(D) K^(1/4) and D / sqrt(K) on the two parts.
AggregationSplit dendritic_aggregation_bounds(const MeshConfig& cfg);

/// C^_E = D_hat (M - 1) l_hat.
double dendritic_delivery_cost(const MeshConfig& cfg);
/// D^(3/2) / K^(1/4).
double dendritic_delivery_cost_approx(const MeshConfig& cfg);

struct CostReport {
  std::uint64_t D = 0;
  std::uint64_t K = 1;
  double C_A = 0.0;
  double C_E = 0.0;
  double C_AG_hat = 0.0;
  double C_AA_hat = 0.0;
  double C_A_hat = 0.0;
  double C_E_hat = 0.0;
  double eta = 1.0;
};

CostReport cost_report(const MeshConfig& cfg);

/// Row-major over D, then K. Cells where sqrt(K) > D are skipped.
std::vector<CostReport> eta_map(std::span<const std::uint64_t> D_values,
                                std::span<const std::uint64_t> K_values);

/// Columns: D, K, C_A, C_E, C_AG_hat, C_AA_hat, C_E_hat, eta.
CsvTable cost_reports_csv(std::span<const CostReport> reports);

/// Costs measured on an explicit PE layout rather than from closed forms.
/// The junction sits at PE (0, 0).
namespace realized {

/// Sum over the N x N grid of the Manhattan distance to the junction.
double aggregation_cost_point(std::uint64_t D);
/// D copies of the rectilinear MST over all N x N PE centers.
double delivery_cost_point(std::uint64_t D);
/// Dendrites of one neuron occupy a sqrt(K) x sqrt(K) block; gathering is
/// the block's rectilinear MST and the aggregated output travels from the
/// block corner to the junction. Requires cfg.grid_realizable().
AggregationSplit dendritic_aggregation_cost(const MeshConfig& cfg);
/// D_hat copies of the rectilinear MST over the sqrt(M) x sqrt(M) grid.
double dendritic_delivery_cost(const MeshConfig& cfg);

} // namespace realized

/// Rows x cols layout of M PEs: the most nearly square factorization, rows
/// <= cols, both at pitch 1/sqrt(M).
std::pair<std::uint64_t, std::uint64_t> pe_grid(std::uint64_t M);

struct SparseDeliveryResult {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> pattern_costs;
  /// Input dimensions across all patterns left with no targets.
  std::uint64_t empty_dimensions = 0;
};

/// Each of the D_hat input dimensions keeps every PE independently with
/// probability 1 - sparsity; its delivery cost is the rectilinear MST over
/// the kept PEs. Pattern p draws from stream p of `seed`. Requires integer
/// M and D_hat.
SparseDeliveryResult sparse_delivery_cost(const MeshConfig& cfg, double sparsity,
                                          std::size_t n_patterns, std::uint64_t seed,
                                          unsigned threads = 1);

/// Least-squares slope of ln(cost) against ln(sqrt K).
double fit_k_slope(std::span<const std::pair<std::uint64_t, double>> costs);

} // namespace dwb::mesh
