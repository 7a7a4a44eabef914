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

#include "dwb/toy_trainer.hpp"

#include "dwb/error.hpp"
#include "dwb/intmath.hpp"
#include "dwb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dwb::toy {

namespace {

using dendrite::DendriticLayerSpec;
using dendrite::LayerShape;
using dendrite::Matrix;

enum Stream : std::uint64_t { kCenters = 0, kTrain = 1, kTest = 2, kInit = 3, kShuffle = 4 };

Dataset sample_split(const BlobConfig& cfg, const std::vector<double>& centers,
                     std::size_t n, RandomStream& rng) {
  Dataset d{cfg.features, cfg.classes, std::vector<double>(n * cfg.features),
            std::vector<std::uint32_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % cfg.classes;
    const std::size_t cluster = cls * cfg.clusters_per_class +
                                static_cast<std::size_t>(rng.uniform_index(cfg.clusters_per_class));
    d.y[i] = static_cast<std::uint32_t>(cls);
    for (std::size_t f = 0; f < cfg.features; ++f) {
      d.x[i * cfg.features + f] =
          centers[cluster * cfg.features + f] + cfg.cluster_std * rng.normal();
    }
  }
  return d;
}

struct Layer {
  LayerShape shape;
  dendrite::Activation activation;
  Matrix weights;
  std::vector<double> biases;

  DendriticLayerSpec spec() const { return {shape, weights, biases, activation}; }
};

struct Network {
  std::vector<Layer> layers;

  std::vector<double> logits(std::span<const double> x) const {
    std::vector<double> h(x.begin(), x.end());
    for (const auto& l : layers) {
      h = dendrite::forward_dendritic(h, l.spec()).outputs;
    }
    return h;
  }
};

double accuracy(const Network& net, const Dataset& d) {
  if (d.size() == 0) {
    return 0.0;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto z = net.logits(d.row(i));
    const auto best = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    correct += best == d.y[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

} // namespace

BlobSplit make_blobs(const BlobConfig& cfg, std::uint64_t seed) {
  if (cfg.features == 0 || cfg.classes < 2 || cfg.clusters_per_class == 0) {
    throw ArgumentError("blobs need features >= 1, classes >= 2 and clusters >= 1");
  }
  if (!(cfg.cluster_std >= 0.0) || !(cfg.spread > 0.0)) {
    throw ArgumentError("cluster_std must be >= 0 and spread > 0");
  }
  RandomStream center_rng(seed, kCenters);
  std::vector<double> centers(cfg.classes * cfg.clusters_per_class * cfg.features);
  for (double& c : centers) {
    c = cfg.spread * (2.0 * center_rng.uniform() - 1.0);
  }
  RandomStream train_rng(seed, kTrain);
  RandomStream test_rng(seed, kTest);
  return {sample_split(cfg, centers, cfg.train_size, train_rng),
          sample_split(cfg, centers, cfg.test_size, test_rng)};
}

std::vector<LayerShape> network_shapes(const TrainConfig& cfg) {
  const auto root = cfg.dendrites == 0 ? std::nullopt : exact_sqrt(cfg.dendrites);
  if (!root) {
    throw ArgumentError("dendrites must be a perfect square");
  }
  if (cfg.width == 0 || cfg.width % *root != 0) {
    throw ArgumentError("width must be a positive multiple of sqrt(dendrites)");
  }
  const std::size_t in = cfg.data.features;
  const std::size_t out = cfg.data.classes;
  const std::size_t D = cfg.width;
  if (*root == 1) {
    return {{in, D, 1}, {D, D, 1}, {D, D, 1}, {D, out, 1}};
  }
  const std::size_t r = *root;
  const std::size_t d_hat = D / r;
  return {{in, d_hat, r}, {d_hat, d_hat, cfg.dendrites}, {d_hat, D, r}, {D, out, 1}};
}

TrainResult train_toy(const TrainConfig& cfg, std::uint64_t seed) {
  if (cfg.batch_size == 0) {
    throw ArgumentError("batch size must be positive");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw ArgumentError("learning rate must be positive");
  }
  const auto shapes = network_shapes(cfg);
  const BlobSplit data = make_blobs(cfg.data, seed);

  TrainResult result;
  Network net;
  RandomStream init_rng(seed, kInit);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const bool last = i + 1 == shapes.size();
    const auto act = last ? dendrite::Activation::identity() : cfg.activation;
    const double gain = last ? cfg.init_gain : cfg.init_gain * std::sqrt(2.0);
    auto spec = DendriticLayerSpec::random(shapes[i], act, init_rng, gain);
    net.layers.push_back({shapes[i], act, spec.weights(),
                          std::vector<double>(spec.biases().begin(), spec.biases().end())});
    result.weight_count += spec.weights().rows() * spec.weights().cols();
  }

  result.initial_accuracy = accuracy(net, data.test);
  result.final_accuracy = result.initial_accuracy;

  RandomStream shuffle_rng(seed, kShuffle);
  const Dataset& train = data.train;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<DendriticLayerSpec> specs;
      for (const auto& l : net.layers) {
        specs.push_back(l.spec());
      }
      std::vector<Matrix> gw;
      std::vector<std::vector<double>> gb;
      for (const auto& l : net.layers) {
        gw.emplace_back(l.weights.rows(), l.weights.cols());
        gb.emplace_back(l.biases.size(), 0.0);
      }
      for (std::size_t s = start; s < end; ++s) {
        const std::size_t idx = order[s];
        std::vector<dendrite::ForwardRecord> records;
        std::vector<double> h(train.row(idx).begin(), train.row(idx).end());
        for (const auto& spec : specs) {
          records.push_back(dendrite::forward_dendritic(h, spec));
          h = records.back().outputs;
        }
        const double zmax = *std::max_element(h.begin(), h.end());
        double denom = 0.0;
        for (double z : h) {
          denom += std::exp(z - zmax);
        }
        const double log_denom = std::log(denom) + zmax;
        loss_sum += log_denom - h[train.y[idx]];
        std::vector<double> grad(h.size());
        for (std::size_t c = 0; c < h.size(); ++c) {
          grad[c] = std::exp(h[c] - log_denom) - (c == train.y[idx] ? 1.0 : 0.0);
        }
        for (std::size_t li = specs.size(); li-- > 0;) {
          auto g = dendrite::backward_dendritic(records[li], specs[li], grad);
          auto dst = gw[li].values();
          const auto src = g.weights.values();
          for (std::size_t k = 0; k < dst.size(); ++k) {
            dst[k] += src[k];
          }
          for (std::size_t k = 0; k < gb[li].size(); ++k) {
            gb[li][k] += g.biases[k];
          }
          grad = std::move(g.input);
        }
      }
      const double step = cfg.learning_rate / static_cast<double>(end - start);
      for (std::size_t li = 0; li < net.layers.size(); ++li) {
        auto w = net.layers[li].weights.values();
        const auto g = gw[li].values();
        for (std::size_t k = 0; k < w.size(); ++k) {
          w[k] -= step * g[k];
        }
        for (std::size_t k = 0; k < gb[li].size(); ++k) {
          net.layers[li].biases[k] -= step * gb[li][k];
        }
      }
    }
    const double loss = train.size() == 0 ? 0.0 : loss_sum / static_cast<double>(train.size());
    if (!std::isfinite(loss)) {
      result.status = TrainStatus::Diverged;
      result.message = "loss became non-finite at epoch " + std::to_string(epoch);
      return result;
    }
    result.final_accuracy = accuracy(net, data.test);
    result.curve.push_back({epoch, loss, result.final_accuracy});
  }
  return result;
}

CsvTable metrics_csv(const TrainResult& result) {
  CsvTable t({"epoch", "loss", "accuracy"});
  for (const auto& m : result.curve) {
    t.add_row({m.epoch, m.loss, m.accuracy});
  }
  return t;
}

} // namespace dwb::toy
