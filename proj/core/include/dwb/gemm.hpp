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

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dwb::gemm {

/// C = A B with A: M x L and B: L x N. With K > 1 dendrites the product is
/// computed at the equal-MAC dendritic shape A^: M x (L / sqrt K),
/// B^: (L / sqrt K) x (N sqrt K), and every K adjacent columns of the result
/// are summed on chip before write-back.
struct GemmShape {
  std::uint64_t M = 0;
  std::uint64_t N = 0;
  std::uint64_t L = 0;
  std::uint64_t K = 1;
};

struct EffectiveShape {
  std::uint64_t m = 0; ///< rows of A^ and C^
  std::uint64_t n = 0; ///< columns of B^ and C^
  std::uint64_t l = 0; ///< inner dimension
  std::uint64_t reduce = 1; ///< adjacent C^ columns summed per output (K)
};

/// Throws ArgumentError unless K is a perfect square dividing L and N
/// appropriately.
EffectiveShape effective_shape(const GemmShape& shape);

enum class Ordering { RowMajor, Grouped };

struct TilePlan {
  std::uint64_t B_M = 1;
  std::uint64_t B_N = 1;
  std::uint64_t B_L = 1;
  std::uint64_t G = 1; ///< block-rows of C per group (Grouped only)
  Ordering ordering = Ordering::RowMajor;
};

/// None: every block access reads global memory. LRU: fully associative,
/// block granular. Explicit: offline-optimal (Belady) residency, standing in
/// for software-managed placement that keeps exactly the blocks that will
/// be reused soonest.
enum class Policy { None, LRU, Explicit };

struct CacheModel {
  std::uint64_t capacity = 0; ///< elements
  Policy policy = Policy::None;
};

std::string to_string(Ordering o);
std::string to_string(Policy p);
Ordering parse_ordering(const std::string& s);
Policy parse_policy(const std::string& s);

struct TrafficReport {
  std::uint64_t reads_global = 0;
  std::uint64_t writes_global = 0;
  double analytic_reads = 0.0;
  double analytic_writes = 0.0;
};

/// Validates divisibility of the plan against the effective shape.
void validate(const GemmShape& shape, const TilePlan& plan);

/// Analytic fields only: row-major reads (B_M + B_N) l (m / B_M)(n / B_N),
/// grouped reads n l m / (B_M G) + m l, writes M N / sqrt K.
TrafficReport analytic_costs(const GemmShape& shape, const TilePlan& plan);

/// Grouped reads with G B_M eliminated through the capacity identity
/// G B_M = Q / l - B_N.
double grouped_reads_at_capacity(const GemmShape& shape, std::uint64_t B_N, double Q);
/// Large-cache approximation n l^2 m / Q + m l.
double grouped_reads_approx(const GemmShape& shape, double Q);
/// Smallest Q at which G block-rows of A plus one block-column of B fit.
std::uint64_t grouped_capacity(const GemmShape& shape, const TilePlan& plan);

enum class Operand : std::uint8_t { A, B, C };

struct BlockAccess {
  Operand operand = Operand::A;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  /// Elements moved: block size for A/B reads, outputs completed for C.
  std::uint32_t elements = 0;
};

struct BlockSchedule {
  GemmShape shape;
  TilePlan plan;
  std::vector<BlockAccess> accesses;

  /// Inner (A, B) steps: (m / B_M)(n / B_N)(l / B_L).
  std::uint64_t steps() const noexcept;
};

/// For every C block in plan order and every inner block index k: read
/// A(r, k) then B(k, c); after the last k, write the C block's completed
/// outputs.
BlockSchedule build_schedule(const GemmShape& shape, const TilePlan& plan);

/// C blocks of the schedule in visiting order, as (row, col).
std::vector<std::pair<std::uint32_t, std::uint32_t>> c_block_order(const BlockSchedule& s);

/// Counts global reads and writes; analytic fields are filled from the
/// schedule's shape and plan. Blocks larger than the capacity bypass the
/// cache.
TrafficReport simulate_cache(const BlockSchedule& schedule, const CacheModel& cache);

struct SweepRow {
  GemmShape shape;
  TilePlan plan;
  CacheModel cache;
  TrafficReport traffic;
  double read_ratio = 1.0;  ///< reads_sim / reads_sim at K = 1
  double write_ratio = 1.0; ///< writes_sim / writes_sim at K = 1
};

/// Largest divisor of m / B_M not exceeding (Q / l - B_N) / B_M, at least 1.
std::uint64_t auto_group(const GemmShape& shape, const TilePlan& plan, std::uint64_t Q);

/// One grouped simulation per K. When plan.G is 0 each row picks
/// auto_group for its shape. The first entry of K_values is the reference
/// for the ratio columns.
std::vector<SweepRow> dendritic_reduction_sweep(const GemmShape& base,
                                                std::span<const std::uint64_t> K_values,
                                                const CacheModel& cache, TilePlan plan);

/// Columns: M, N, L, K, B_M, B_N, G, Q, policy, reads_sim, reads_analytic,
/// writes_sim, writes_analytic, read_ratio, write_ratio.
CsvTable sweep_csv(std::span<const SweepRow> rows);

} // namespace dwb::gemm
