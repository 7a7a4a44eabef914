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
#include "dwb/toy_trainer.hpp"

#include <gtest/gtest.h>

#include <set>

namespace {

using namespace dwb::toy;

std::size_t weights_of(const std::vector<dwb::dendrite::LayerShape>& shapes) {
  std::size_t n = 0;
  for (const auto& s : shapes) {
    n += s.n_inputs * s.n_neurons * s.dendrites;
  }
  return n;
}

TEST(Blobs, DeterministicShapesAndLabels) {
  BlobConfig cfg;
  cfg.classes = 3;
  cfg.train_size = 90;
  cfg.test_size = 30;
  const auto a = make_blobs(cfg, 4);
  const auto b = make_blobs(cfg, 4);
  EXPECT_EQ(a.train.x, b.train.x);
  EXPECT_EQ(a.test.y, b.test.y);
  EXPECT_EQ(a.train.size(), 90u);
  EXPECT_EQ(a.test.x.size(), 30u * cfg.features);
  std::set<std::uint32_t> labels(a.train.y.begin(), a.train.y.end());
  EXPECT_EQ(labels, (std::set<std::uint32_t>{0, 1, 2}));
  EXPECT_NE(make_blobs(cfg, 5).train.x, a.train.x);
}

TEST(Blobs, RejectsDegenerateConfigs) {
  BlobConfig cfg;
  cfg.classes = 1;
  EXPECT_THROW(make_blobs(cfg, 1), dwb::ArgumentError);
  cfg = {};
  cfg.spread = 0.0;
  EXPECT_THROW(make_blobs(cfg, 1), dwb::ArgumentError);
}

TEST(Shapes, DendriticNetworkHasTheSameWeightCount) {
  TrainConfig point;
  point.width = 16;
  for (std::size_t K : {4u, 16u}) {
    TrainConfig dend = point;
    dend.dendrites = K;
    EXPECT_EQ(weights_of(network_shapes(dend)), weights_of(network_shapes(point))) << "K=" << K;
  }
  TrainConfig bad = point;
  bad.dendrites = 2;
  EXPECT_THROW(network_shapes(bad), dwb::ArgumentError);
  bad.dendrites = 64;
  bad.width = 12;
  EXPECT_THROW(network_shapes(bad), dwb::ArgumentError);
}

TEST(Training, SeparableBlobsAreLearned) {
  TrainConfig cfg;
  cfg.data.cluster_std = 0.3;
  cfg.epochs = 15;
  for (std::size_t K : {1u, 4u}) {
    cfg.dendrites = K;
    const auto r = train_toy(cfg, 1);
    ASSERT_EQ(r.status, TrainStatus::Ok);
    EXPECT_GT(r.final_accuracy, 0.95) << "K=" << K;
    EXPECT_EQ(r.curve.size(), cfg.epochs);
    EXPECT_LT(r.curve.back().loss, r.curve.front().loss);
  }
}

TEST(Training, DeterministicPerSeed) {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.dendrites = 4;
  const auto a = train_toy(cfg, 9);
  const auto b = train_toy(cfg, 9);
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].loss, b.curve[i].loss);
    EXPECT_EQ(a.curve[i].accuracy, b.curve[i].accuracy);
  }
}

TEST(Training, ReportsDivergence) {
  TrainConfig cfg;
  cfg.learning_rate = 1e300;
  cfg.epochs = 5;
  const auto r = train_toy(cfg, 1);
  EXPECT_EQ(r.status, TrainStatus::Diverged);
  EXPECT_FALSE(r.message.empty());
}

TEST(Csv, OneRowPerEpoch) {
  TrainConfig cfg;
  cfg.epochs = 2;
  const auto t = metrics_csv(train_toy(cfg, 1));
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.header(), (std::vector<std::string>{"epoch", "loss", "accuracy"}));
}

} // namespace
