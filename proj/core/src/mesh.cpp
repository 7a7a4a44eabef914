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

#include "dwb/mesh.hpp"

#include "dwb/error.hpp"
#include "dwb/fit.hpp"
#include "dwb/intmath.hpp"
#include "dwb/mst.hpp"
#include "dwb/parallel.hpp"
#include "dwb/rng.hpp"

#include <cmath>
#include <string>

namespace dwb::mesh {

namespace {

std::uint64_t grid_side(std::uint64_t D) {
  if (D == 0) {
    throw ArgumentError("layer width D must be positive");
  }
  const auto n = exact_sqrt(D);
  if (!n) {
    throw ArgumentError("D=" + std::to_string(D) + " is not a perfect square");
  }
  return *n;
}

std::vector<mst::GridPoint> full_grid(std::uint64_t rows, std::uint64_t cols) {
  std::vector<mst::GridPoint> pts;
  pts.reserve(rows * cols);
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      pts.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)});
    }
  }
  return pts;
}

// Sum over an n x n grid of (row + col), i.e. n^2 (n - 1).
std::uint64_t corner_distance_sum(std::uint64_t n) {
  std::uint64_t total = 0;
  for (std::uint64_t r = 0; r < n; ++r) {
    for (std::uint64_t c = 0; c < n; ++c) {
      total += r + c;
    }
  }
  return total;
}

} // namespace

MeshConfig::MeshConfig(std::uint64_t D, std::uint64_t K) : d_(D), k_(K) {
  grid_side(D);
  if (K == 0) {
    throw ArgumentError("K must be at least 1");
  }
  if (std::sqrt(static_cast<double>(K)) > static_cast<double>(D)) {
    throw ArgumentError("sqrt(K) exceeds D: fewer than one dendritic neuron (D=" +
                        std::to_string(D) + ", K=" + std::to_string(K) + ")");
  }
}

double MeshConfig::N() const noexcept { return std::sqrt(static_cast<double>(d_)); }
double MeshConfig::l() const noexcept { return 1.0 / N(); }
double MeshConfig::M() const noexcept {
  return static_cast<double>(d_) * std::sqrt(static_cast<double>(k_));
}
double MeshConfig::l_hat() const noexcept { return 1.0 / std::sqrt(M()); }
double MeshConfig::D_hat() const noexcept {
  return static_cast<double>(d_) / std::sqrt(static_cast<double>(k_));
}
double MeshConfig::N_hat() const noexcept { return std::sqrt(D_hat()); }

bool MeshConfig::grid_realizable() const noexcept {
  const auto root_k = exact_sqrt(k_);
  if (!root_k || d_ % *root_k != 0) {
    return false;
  }
  return exact_sqrt(d_ / *root_k).has_value() && exact_sqrt(d_ * *root_k).has_value();
}

double aggregation_cost_point(std::uint64_t D) {
  const auto n = static_cast<double>(grid_side(D));
  return static_cast<double>(D) - n;
}

double delivery_cost_point(std::uint64_t D) {
  const auto n = static_cast<double>(grid_side(D));
  return (static_cast<double>(D) - 1.0) * n;
}

AggregationSplit dendritic_aggregation_cost(const MeshConfig& cfg) {
  const double k = static_cast<double>(cfg.K());
  const double quarter = std::sqrt(std::sqrt(k));
  return {(k - 1.0) * cfg.D_hat() * cfg.l_hat(),
          cfg.D_hat() / cfg.N() * (cfg.N_hat() - 1.0) * quarter};
}

AggregationSplit dendritic_aggregation_bounds(const MeshConfig& cfg) {
  const double k = static_cast<double>(cfg.K());
  return {cfg.N() * std::sqrt(std::sqrt(k)), cfg.D_hat()};
}

double dendritic_delivery_cost(const MeshConfig& cfg) {
  const double m = cfg.M();
  return (cfg.D_hat() * (m - 1.0)) / std::sqrt(m);
}

double dendritic_delivery_cost_approx(const MeshConfig& cfg) {
  const double d = static_cast<double>(cfg.D());
  return d * std::sqrt(d) / std::sqrt(std::sqrt(static_cast<double>(cfg.K())));
}

CostReport cost_report(const MeshConfig& cfg) {
  CostReport r;
  r.D = cfg.D();
  r.K = cfg.K();
  r.C_A = aggregation_cost_point(cfg.D());
  r.C_E = delivery_cost_point(cfg.D());
  const AggregationSplit split = dendritic_aggregation_cost(cfg);
  r.C_AG_hat = split.gather;
  r.C_AA_hat = split.aggregate;
  r.C_A_hat = split.gather + split.aggregate;
  r.C_E_hat = dendritic_delivery_cost(cfg);
  const double base = r.C_A + r.C_E;
  // A single-PE layer has no communication at all; treat it as parity.
  r.eta = base > 0.0 ? (r.C_A_hat + r.C_E_hat) / base : 1.0;
  return r;
}

std::vector<CostReport> eta_map(std::span<const std::uint64_t> D_values,
                                std::span<const std::uint64_t> K_values) {
  std::vector<CostReport> out;
  for (std::uint64_t D : D_values) {
    for (std::uint64_t K : K_values) {
      if (K == 0 || std::sqrt(static_cast<double>(K)) > static_cast<double>(D)) {
        continue;
      }
      out.push_back(cost_report(MeshConfig(D, K)));
    }
  }
  return out;
}

CsvTable cost_reports_csv(std::span<const CostReport> reports) {
  CsvTable t({"D", "K", "C_A", "C_E", "C_AG_hat", "C_AA_hat", "C_E_hat", "eta"});
  for (const auto& r : reports) {
    t.add_row({r.D, r.K, r.C_A, r.C_E, r.C_AG_hat, r.C_AA_hat, r.C_E_hat, r.eta});
  }
  return t;
}

namespace realized {

double aggregation_cost_point(std::uint64_t D) {
  const std::uint64_t n = grid_side(D);
  return static_cast<double>(corner_distance_sum(n)) / static_cast<double>(n);
}

double delivery_cost_point(std::uint64_t D) {
  const std::uint64_t n = grid_side(D);
  const auto grid = full_grid(n, n);
  const auto steps = static_cast<std::uint64_t>(mst::manhattan_mst_steps(grid));
  return static_cast<double>(D * steps) / static_cast<double>(n);
}

AggregationSplit dendritic_aggregation_cost(const MeshConfig& cfg) {
  if (!cfg.grid_realizable()) {
    throw ArgumentError("configuration D=" + std::to_string(cfg.D()) + ", K=" +
                        std::to_string(cfg.K()) + " has no whole-PE layout");
  }
  const std::uint64_t root_k = *exact_sqrt(cfg.K());
  const std::uint64_t d_hat = cfg.D() / root_k;
  const std::uint64_t n_hat = *exact_sqrt(d_hat);
  const double side = std::sqrt(cfg.M());
  const auto block = full_grid(root_k, root_k);
  const auto gather_steps = static_cast<std::uint64_t>(mst::manhattan_mst_steps(block));
  const std::uint64_t aggregate_steps = corner_distance_sum(n_hat) * root_k;
  return {static_cast<double>(d_hat * gather_steps) / side,
          static_cast<double>(aggregate_steps) / side};
}

double dendritic_delivery_cost(const MeshConfig& cfg) {
  if (!cfg.grid_realizable()) {
    throw ArgumentError("configuration D=" + std::to_string(cfg.D()) + ", K=" +
                        std::to_string(cfg.K()) + " has no whole-PE layout");
  }
  const std::uint64_t root_k = *exact_sqrt(cfg.K());
  const std::uint64_t d_hat = cfg.D() / root_k;
  const std::uint64_t side = *exact_sqrt(cfg.D() * root_k);
  const auto grid = full_grid(side, side);
  const auto steps = static_cast<std::uint64_t>(mst::manhattan_mst_steps(grid));
  return static_cast<double>(d_hat * steps) / static_cast<double>(side);
}

} // namespace realized

std::pair<std::uint64_t, std::uint64_t> pe_grid(std::uint64_t M) {
  if (M == 0) {
    throw ArgumentError("a mesh needs at least one PE");
  }
  for (std::uint64_t r = isqrt_floor(M); r >= 1; --r) {
    if (M % r == 0) {
      return {r, M / r};
    }
  }
  return {1, M};
}

SparseDeliveryResult sparse_delivery_cost(const MeshConfig& cfg, double sparsity,
                                          std::size_t n_patterns, std::uint64_t seed,
                                          unsigned threads) {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw ArgumentError("sparsity must lie in [0, 1)");
  }
  if (n_patterns == 0) {
    throw ArgumentError("at least one connection pattern is required");
  }
  const auto root_k = exact_sqrt(cfg.K());
  if (!root_k || cfg.D() % *root_k != 0) {
    throw ArgumentError("sparse delivery needs integer M and D_hat (D=" +
                        std::to_string(cfg.D()) + ", K=" + std::to_string(cfg.K()) + ")");
  }
  const std::uint64_t d_hat = cfg.D() / *root_k;
  const std::uint64_t m = cfg.D() * *root_k;
  const auto [rows, cols] = pe_grid(m);
  const double side = std::sqrt(static_cast<double>(m));

  SparseDeliveryResult res;
  res.pattern_costs.assign(n_patterns, 0.0);
  std::vector<std::uint64_t> empties(n_patterns, 0);
  parallel_for(n_patterns, threads, [&](std::size_t p) {
    RandomStream rng(seed, p);
    std::vector<mst::GridPoint> kept;
    kept.reserve(m);
    std::uint64_t steps = 0;
    for (std::uint64_t dim = 0; dim < d_hat; ++dim) {
      kept.clear();
      for (std::uint64_t r = 0; r < rows; ++r) {
        for (std::uint64_t c = 0; c < cols; ++c) {
          if (rng.uniform() >= sparsity) {
            kept.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)});
          }
        }
      }
      if (kept.empty()) {
        ++empties[p];
      }
      steps += static_cast<std::uint64_t>(mst::manhattan_mst_steps(kept));
    }
    res.pattern_costs[p] = static_cast<double>(steps) / side;
  });

  double sum = 0.0;
  for (std::size_t p = 0; p < n_patterns; ++p) {
    sum += res.pattern_costs[p];
    res.empty_dimensions += empties[p];
  }
  res.mean = sum / static_cast<double>(n_patterns);
  if (n_patterns > 1) {
    double ss = 0.0;
    for (double c : res.pattern_costs) {
      ss += (c - res.mean) * (c - res.mean);
    }
    res.stddev = std::sqrt(ss / static_cast<double>(n_patterns - 1));
  }
  return res;
}

double fit_k_slope(std::span<const std::pair<std::uint64_t, double>> costs) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [k, cost] : costs) {
    x.push_back(std::sqrt(static_cast<double>(k)));
    y.push_back(cost);
  }
  return fit_loglog(x, y).slope;
}

} // namespace dwb::mesh
