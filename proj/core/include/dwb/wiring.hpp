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
#include <vector>

namespace dwb::wiring {

/// Largest cloud wiring_cost will build. Dense Prim is quadratic, so this
/// bounds a single trial to a few seconds.
inline constexpr std::size_t kMaxPoints = 65536;

/// Uniform points in the unit square (dim 2) or cube (dim 3).
struct SynapseCloud {
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> coords; ///< row-major, size() * dim values

  std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

SynapseCloud sample_cloud(std::size_t n, std::size_t dim, std::uint64_t seed,
                          std::uint64_t stream = 0);

double emst_length(const SynapseCloud& cloud);

struct WiringEstimate {
  std::size_t D = 0;
  std::size_t K = 1;
  std::size_t dim = 2;
  std::size_t trials = 0;
  std::vector<double> tree_lengths; ///< one per trial, by trial index
  double mean_tree_length = 0.0;
  double C_E = 0.0; ///< (D / sqrt K) * mean_tree_length

  std::size_t points() const;
  double stddev() const;
};

/// Mean EMST over `trials` clouds of D*sqrt(K) points. Trial t draws from
/// stream t of `seed`, so results do not depend on `threads`.
WiringEstimate wiring_cost(std::size_t D, std::size_t K, std::size_t dim, std::size_t trials,
                           std::uint64_t seed, unsigned threads = 1);

/// C_E = alpha * (D / sqrt K) * (D sqrt K)^beta, fitted in log-log space.
struct PowerLawFit {
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;
};

PowerLawFit fit_power_law(std::span<const WiringEstimate> estimates);

/// Columns: dim, D, K, trial, tree_length, C_E.
CsvTable estimates_csv(std::span<const WiringEstimate> estimates);

} // namespace dwb::wiring
