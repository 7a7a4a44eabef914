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

#include "dwb/wiring.hpp"

#include "dwb/error.hpp"
#include "dwb/fit.hpp"
#include "dwb/intmath.hpp"
#include "dwb/mst.hpp"
#include "dwb/parallel.hpp"
#include "dwb/rng.hpp"

#include <cmath>
#include <string>

namespace dwb::wiring {

SynapseCloud sample_cloud(std::size_t n, std::size_t dim, std::uint64_t seed,
                          std::uint64_t stream) {
  if (dim != 2 && dim != 3) {
    throw ArgumentError("cloud dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (n == 0) {
    throw ArgumentError("a synapse cloud needs at least one point");
  }
  SynapseCloud cloud{dim, seed, stream, std::vector<double>(n * dim)};
  RandomStream rng(seed, stream);
  for (double& c : cloud.coords) {
    c = rng.uniform();
  }
  return cloud;
}

double emst_length(const SynapseCloud& cloud) {
  return mst::euclidean_mst_length(cloud.coords, cloud.dim);
}

std::size_t WiringEstimate::points() const { return D * exact_sqrt(K).value_or(0); }

double WiringEstimate::stddev() const {
  if (tree_lengths.size() < 2) {
    return 0.0;
  }
  double ss = 0.0;
  for (double t : tree_lengths) {
    ss += (t - mean_tree_length) * (t - mean_tree_length);
  }
  return std::sqrt(ss / static_cast<double>(tree_lengths.size() - 1));
}

WiringEstimate wiring_cost(std::size_t D, std::size_t K, std::size_t dim, std::size_t trials,
                           std::uint64_t seed, unsigned threads) {
  if (D == 0 || K == 0) {
    throw ArgumentError("D and K must be positive");
  }
  if (trials == 0) {
    throw ArgumentError("wiring_cost needs at least one trial");
  }
  if (dim != 2 && dim != 3) {
    throw ArgumentError("cloud dimension must be 2 or 3, got " + std::to_string(dim));
  }
  const auto root = exact_sqrt(K);
  if (!root) {
    throw ArgumentError("D*sqrt(K) must be integral; K=" + std::to_string(K) +
                        " is not a perfect square");
  }
  const std::size_t root_k = *root;
  const std::size_t n = D * root_k;
  if (n > kMaxPoints) {
    throw CapacityError("cloud of " + std::to_string(n) + " points exceeds the limit of " +
                        std::to_string(kMaxPoints));
  }

  WiringEstimate est;
  est.D = D;
  est.K = K;
  est.dim = dim;
  est.trials = trials;
  est.tree_lengths.assign(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    est.tree_lengths[t] = emst_length(sample_cloud(n, dim, seed, t));
  });
  double sum = 0.0;
  for (double t : est.tree_lengths) {
    sum += t;
  }
  est.mean_tree_length = sum / static_cast<double>(trials);
  est.C_E = static_cast<double>(D) / static_cast<double>(root_k) * est.mean_tree_length;
  return est;
}

PowerLawFit fit_power_law(std::span<const WiringEstimate> estimates) {
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(estimates.size());
  y.reserve(estimates.size());
  for (const auto& e : estimates) {
    const double root_k = std::sqrt(static_cast<double>(e.K));
    x.push_back(static_cast<double>(e.D) * root_k);
    y.push_back(e.C_E / (static_cast<double>(e.D) / root_k));
  }
  const LineFit line = fit_loglog(x, y);
  return {std::exp(line.intercept), line.slope, line.residual};
}

CsvTable estimates_csv(std::span<const WiringEstimate> estimates) {
  CsvTable table({"dim", "D", "K", "trial", "tree_length", "C_E"});
  for (const auto& e : estimates) {
    for (std::size_t t = 0; t < e.tree_lengths.size(); ++t) {
      table.add_row({e.dim, e.D, e.K, t, e.tree_lengths[t], e.C_E});
    }
  }
  return table;
}

} // namespace dwb::wiring
