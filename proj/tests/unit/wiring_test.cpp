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

#include "dwb/error.hpp"
#include "dwb/wiring.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace dwb::wiring;

TEST(SampleCloud, DeterministicAndInsideUnitCube) {
  const auto a = sample_cloud(500, 3, 9, 2);
  const auto b = sample_cloud(500, 3, 9, 2);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_EQ(a.size(), 500u);
  for (double v : a.coords) {
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
  EXPECT_NE(sample_cloud(500, 3, 9, 3).coords, a.coords);
  EXPECT_THROW(sample_cloud(10, 4, 1), dwb::ArgumentError);
  EXPECT_THROW(sample_cloud(0, 2, 1), dwb::ArgumentError);
}

TEST(EmstLength, AgreesWithKruskal) {
  const auto c = sample_cloud(300, 2, 4);
  EXPECT_NEAR(emst_length(c), dwb::oracle::kruskal_euclidean(c.coords, 2), 1e-9);
}

TEST(WiringCost, ScalesMeanTreeByNeuronCount) {
  const auto e = wiring_cost(64, 16, 2, 4, 3);
  ASSERT_EQ(e.tree_lengths.size(), 4u);
  EXPECT_EQ(e.points(), 256u);
  double mean = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(e.tree_lengths[t], emst_length(sample_cloud(256, 2, 3, t)));
    mean += e.tree_lengths[t] / 4;
  }
  EXPECT_NEAR(e.mean_tree_length, mean, 1e-12);
  EXPECT_NEAR(e.C_E, 16.0 * e.mean_tree_length, 1e-12);
  EXPECT_GT(e.stddev(), 0.0);
}

TEST(WiringCost, ThreadCountDoesNotChangeResults) {
  const auto a = wiring_cost(128, 4, 3, 6, 11, 1);
  const auto b = wiring_cost(128, 4, 3, 6, 11, 3);
  EXPECT_EQ(a.tree_lengths, b.tree_lengths);
}

TEST(WiringCost, RejectsInvalidArguments) {
  EXPECT_THROW(wiring_cost(16, 3, 2, 1, 1), dwb::ArgumentError);
  EXPECT_THROW(wiring_cost(16, 4, 2, 0, 1), dwb::ArgumentError);
  EXPECT_THROW(wiring_cost(0, 4, 2, 1, 1), dwb::ArgumentError);
  EXPECT_THROW(wiring_cost(16, 4, 5, 1, 1), dwb::ArgumentError);
  EXPECT_THROW(wiring_cost(65536, 4, 2, 1, 1), dwb::CapacityError);
}

TEST(WiringCost, SinglePointTreeIsEmpty) {
  EXPECT_EQ(wiring_cost(1, 1, 2, 2, 1).mean_tree_length, 0.0);
}

TEST(PowerLaw, RecoversSyntheticExponent) {
  std::vector<WiringEstimate> cells;
  for (std::size_t K : {1u, 4u, 16u, 64u}) {
    WiringEstimate e;
    e.D = 256;
    e.K = K;
    const double rk = std::sqrt(static_cast<double>(K));
    const double mean = 0.7 * std::pow(256.0 * rk, 0.5);
    e.mean_tree_length = mean;
    e.C_E = 256.0 / rk * mean;
    cells.push_back(e);
  }
  const auto fit = fit_power_law(cells);
  EXPECT_NEAR(fit.beta, 0.5, 1e-12);
  EXPECT_NEAR(fit.alpha, 0.7, 1e-12);
  EXPECT_NEAR(fit.residual, 0.0, 1e-20);
}

TEST(PowerLaw, SingleAbscissaIsDegenerate) {
  std::vector<WiringEstimate> cells(2);
  for (auto& c : cells) {
    c.D = 16;
    c.K = 4;
    c.mean_tree_length = 1.0;
    c.C_E = 8.0;
  }
  EXPECT_THROW(fit_power_law(cells), dwb::DegenerateFitError);
}

// Random-cloud EMSTs grow like n^((d-1)/d); a modest grid already shows it.
TEST(PowerLaw, SmallGridExponentNearTheoryInTwoAndThreeDimensions) {
  for (std::size_t dim : {2u, 3u}) {
    std::vector<WiringEstimate> cells;
    for (std::size_t K : {1u, 4u, 16u}) {
      cells.push_back(wiring_cost(256, K, dim, 4, 7));
    }
    const double theory = (static_cast<double>(dim) - 1.0) / static_cast<double>(dim);
    EXPECT_NEAR(fit_power_law(cells).beta, theory, 0.08) << "dim=" << dim;
  }
}

TEST(Csv, OneRowPerTrial) {
  const std::vector<WiringEstimate> cells{wiring_cost(16, 1, 2, 3, 1), wiring_cost(16, 4, 2, 3, 1)};
  const auto t = estimates_csv(cells);
  EXPECT_EQ(t.rows(), 6u);
  EXPECT_EQ(t.header(), (std::vector<std::string>{"dim", "D", "K", "trial", "tree_length", "C_E"}));
}

} // namespace
