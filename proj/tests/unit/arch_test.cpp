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

#include "dwb/arch.hpp"
#include "dwb/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

namespace {

using namespace dwb::arch;

// ResNet-18 parameter count written out layer by layer.
std::uint64_t resnet18_params_by_hand() {
  auto conv = [](std::uint64_t k, std::uint64_t in, std::uint64_t out) {
    return k * k * in * out + 2 * out; // weights + batch-norm affine
  };
  std::uint64_t total = conv(7, 3, 64);
  const std::uint64_t widths[] = {64, 128, 256, 512};
  std::uint64_t in = 64;
  for (std::uint64_t c : widths) {
    total += conv(3, in, c) + conv(3, c, c) + conv(3, c, c) + conv(3, c, c);
    if (in != c) {
      total += conv(1, in, c);
    }
    in = c;
  }
  return total + 512 * 1000 + 1000;
}

const char* kTiny = R"({
  "format": "layers", "name": "tiny",
  "input": {"channels": 3, "height": 8, "width": 8},
  "layers": [
    {"type": "conv", "name": "c1", "in": 3, "out": 4, "kernel": 3, "padding": 1, "batchnorm": true},
    {"type": "avgpool", "name": "pool"},
    {"type": "linear", "name": "fc", "in": 4, "out": 2}
  ]
})";

TEST(Counting, TinyModelByHand) {
  const auto a = arch_from_json(kTiny);
  const auto r = count_macs(a, a.input);
  ASSERT_EQ(r.layers.size(), 3u);
  EXPECT_EQ(r.layers[0].params, 3u * 4 * 9 + 8);
  EXPECT_EQ(r.layers[2].params, 4u * 2 + 2);
  // conv products 64*4*27, batch norm 64*4, pooling 4*63 half-adds, fc 8 + bias 2 half-adds.
  EXPECT_EQ(r.layers[0].half_macs, 2u * 64 * 4 * 27 + 2 * 64 * 4);
  EXPECT_EQ(r.layers[1].half_macs, 4u * 63);
  EXPECT_EQ(r.layers[2].half_macs, 2u * 8 + 2);
  EXPECT_EQ(r.total_params, 126u);
  EXPECT_DOUBLE_EQ(r.total_macs(), (13824.0 + 512 + 252 + 18) / 2);
  EXPECT_EQ(r.output.channels, 2u);
}

TEST(Counting, ResnetBaselineParamsExact) {
  const auto base = builtin_architecture("resnet18");
  const auto r = count_params(base);
  EXPECT_EQ(r.total_params, 11689512u);
  EXPECT_EQ(r.total_params, resnet18_params_by_hand());
  EXPECT_TRUE(is_point_model(base));
}

TEST(Counting, ResnetBaselineMacsWithinOnePercent) {
  const auto base = builtin_architecture("resnet18");
  const auto r = count_macs(base, {3, 224, 224});
  EXPECT_NEAR(r.total_macs() / 1e6 / 1821.63, 1.0, 0.01);
  EXPECT_EQ(r.output.channels, 1000u);
  EXPECT_EQ(r.output.height, 1u);
}

TEST(Scaling, DendriticResnetRowsWithinOnePercent) {
  const auto base = builtin_architecture("resnet18");
  const std::map<std::uint64_t, std::pair<double, double>> table{
      {4, {11556200, 1804.34}}, {16, {11521800, 1799.65}}, {64, {11512664, 1799.37}}};
  for (const auto& [K, want] : table) {
    const auto a = scale_architecture(base, K);
    const auto r = count_macs(a, {3, 224, 224});
    EXPECT_NEAR(static_cast<double>(r.total_params) / want.first, 1.0, 0.01) << "K=" << K;
    EXPECT_NEAR(r.total_macs() / 1e6 / want.second, 1.0, 0.01) << "K=" << K;
    EXPECT_DOUBLE_EQ(psi(a, base), 1.0 / std::sqrt(static_cast<double>(K)));
    EXPECT_FALSE(is_point_model(a));
  }
}

TEST(Scaling, SingleDendriteIsIdentity) {
  const auto base = builtin_architecture("resnet18");
  const auto a = scale_architecture(base, 1);
  EXPECT_EQ(count_macs(a, {3, 224, 224}).total_half_macs,
            count_macs(base, {3, 224, 224}).total_half_macs);
  EXPECT_EQ(count_params(a).total_params, count_params(base).total_params);
  EXPECT_EQ(psi(a, base), 1.0);
}

TEST(Scaling, ParameterDeviationsItemiseToTheTotal) {
  const auto base = builtin_architecture("resnet18");
  const auto b = count_params(base);
  std::map<std::string, std::int64_t> base_layer;
  for (const auto& l : b.layers) {
    base_layer[l.name] = static_cast<std::int64_t>(l.params);
  }
  const auto d = count_params(scale_architecture(base, 16));
  std::int64_t sum = 0;
  for (const auto& l : d.layers) {
    sum += static_cast<std::int64_t>(l.params) - (base_layer.count(l.name) ? base_layer[l.name] : 0);
  }
  EXPECT_EQ(sum, static_cast<std::int64_t>(d.total_params) - static_cast<std::int64_t>(b.total_params));
}

TEST(Scaling, IdentityShortcutAroundPenultimateBecomesTile) {
  const auto r = count_params(scale_architecture(builtin_architecture("resnet18"), 4));
  std::size_t tiles = 0;
  for (const auto& l : r.layers) {
    tiles += l.kind == "tile";
  }
  EXPECT_GE(tiles, 1u);
}

TEST(Scaling, RejectsInvalidRequests) {
  const auto base = builtin_architecture("resnet18");
  EXPECT_THROW(scale_architecture(base, 3), dwb::ArgumentError);
  EXPECT_THROW(scale_architecture(base, 4, 0.0), dwb::ArgumentError);
  EXPECT_THROW(scale_architecture(base, 64, 0.001), dwb::ArgumentError);
  EXPECT_THROW(scale_architecture(scale_architecture(base, 4), 4), dwb::ArgumentError);
}

TEST(Serialization, RoundTripPreservesCounts) {
  const auto a = scale_architecture(builtin_architecture("resnet18"), 16);
  const auto back = arch_from_json(arch_to_json(a));
  const auto x = count_macs(a, {3, 224, 224});
  const auto y = count_macs(back, {3, 224, 224});
  EXPECT_EQ(x.total_params, y.total_params);
  EXPECT_EQ(x.total_half_macs, y.total_half_macs);
  EXPECT_EQ(x.layers.size(), y.layers.size());
}

TEST(Serialization, RejectsMalformedDescriptors) {
  EXPECT_THROW(arch_from_json("{"), dwb::ValidationError);
  EXPECT_THROW(arch_from_json(R"({"format": "graph"})"), dwb::ValidationError);
  EXPECT_THROW(arch_from_json(R"({"input": {"channels": 1}, "layers": [{"type": "lstm", "name": "x"}]})"),
               dwb::ValidationError);
  EXPECT_THROW(builtin_architecture("vgg99"), dwb::ArgumentError);
  EXPECT_THROW(load_architecture("/nonexistent/arch.json"), dwb::IoError);
}

TEST(Validation, ChannelMismatchIsAShapeError) {
  auto a = arch_from_json(kTiny);
  std::get<Linear>(a.layers[2]).in = 5;
  EXPECT_THROW(count_macs(a, a.input), dwb::ShapeError);
}

TEST(Csv, LayerTable) {
  const auto a = arch_from_json(kTiny);
  const auto t = complexity_csv(count_macs(a, a.input));
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t.header().front(), "layer");
}

} // namespace
