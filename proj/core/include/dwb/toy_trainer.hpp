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
#include "dwb/dendritic.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dwb::toy {

/// Gaussian blobs: each class owns `clusters_per_class` centers drawn
/// uniformly from [-spread, spread]^features; samples add isotropic noise.
struct BlobConfig {
  std::size_t features = 8;
  std::size_t classes = 4;
  std::size_t clusters_per_class = 1;
  double cluster_std = 0.5;
  double spread = 2.0;
  std::size_t train_size = 1024;
  std::size_t test_size = 512;
};

struct Dataset {
  std::size_t features = 0;
  std::size_t classes = 0;
  std::vector<double> x; ///< row-major, size() * features
  std::vector<std::uint32_t> y;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * features, features}; }
};

struct BlobSplit {
  Dataset train;
  Dataset test;
};

/// Centers and both splits depend only on (config, seed).
BlobSplit make_blobs(const BlobConfig& config, std::uint64_t seed);

/// Point network: in -> D -> D -> D -> classes. Dendritic network (K > 1):
/// in -> D/sqrt(K) [sqrt K] -> D/sqrt(K) [K] -> D [sqrt K] -> classes, which
/// has the same number of weights. Hidden layers use `activation`; the
/// output layer is linear.
struct TrainConfig {
  BlobConfig data;
  std::size_t width = 16;
  std::size_t dendrites = 1;
  dendrite::Activation activation = dendrite::Activation::relu();
  double learning_rate = 0.05;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double init_gain = 1.0;
};

std::vector<dendrite::LayerShape> network_shapes(const TrainConfig& config);

enum class TrainStatus { Ok, Diverged };

struct EpochMetrics {
  std::size_t epoch = 0;
  double loss = 0.0;     ///< mean training cross-entropy over the epoch
  double accuracy = 0.0; ///< test accuracy after the epoch
};

struct TrainResult {
  TrainStatus status = TrainStatus::Ok;
  std::string message;
  std::vector<EpochMetrics> curve;
  double initial_accuracy = 0.0;
  double final_accuracy = 0.0;
  std::size_t weight_count = 0;
};

/// Plain minibatch SGD on softmax cross-entropy. A non-finite loss stops
/// training with TrainStatus::Diverged.
TrainResult train_toy(const TrainConfig& config, std::uint64_t seed);

/// Columns: epoch, loss, accuracy.
CsvTable metrics_csv(const TrainResult& result);

} // namespace dwb::toy
