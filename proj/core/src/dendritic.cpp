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

#include "dwb/dendritic.hpp"

#include "dwb/error.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace dwb::dendrite {

double Activation::apply(double pre) const noexcept {
  switch (kind) {
  case ActivationKind::ReLU:
    return pre > 0.0 ? pre : 0.0;
  case ActivationKind::LeakyReLU:
    return pre > 0.0 ? pre : negative_slope * pre;
  case ActivationKind::Identity:
    return pre;
  }
  return pre;
}

double Activation::derivative(double pre) const noexcept {
  switch (kind) {
  case ActivationKind::ReLU:
    return pre > 0.0 ? 1.0 : 0.0;
  case ActivationKind::LeakyReLU:
    return pre > 0.0 ? 1.0 : negative_slope;
  case ActivationKind::Identity:
    return 1.0;
  }
  return 1.0;
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
  case ActivationKind::ReLU:
    return "relu";
  case ActivationKind::LeakyReLU:
    return "leaky_relu";
  case ActivationKind::Identity:
    return "identity";
  }
  return "unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                     std::to_string(data_.size()) + " values");
  }
}

DendriticLayerSpec::DendriticLayerSpec(LayerShape shape, Matrix weights,
                                       std::vector<double> biases, Activation activation)
    : shape_(shape), weights_(std::move(weights)), biases_(std::move(biases)),
      activation_(activation) {
  if (shape_.n_inputs == 0 || shape_.n_neurons == 0 || shape_.dendrites == 0) {
    throw ArgumentError("layer dimensions and dendrite count must be positive");
  }
  const std::size_t rows = shape_.n_neurons * shape_.dendrites;
  if (weights_.rows() != rows || weights_.cols() != shape_.n_inputs) {
    throw ShapeError("weights must be " + std::to_string(rows) + "x" +
                     std::to_string(shape_.n_inputs));
  }
  if (biases_.size() != rows) {
    throw ShapeError("biases must have one entry per dendrite (" + std::to_string(rows) + ")");
  }
}

DendriticLayerSpec DendriticLayerSpec::random(LayerShape shape, Activation activation,
                                              RandomStream& rng, double gain) {
  const std::size_t rows = shape.n_neurons * shape.dendrites;
  Matrix w(rows, shape.n_inputs);
  const double fan = static_cast<double>(shape.n_inputs * shape.dendrites);
  const double std_dev = fan > 0 ? gain / std::sqrt(fan) : 0.0;
  for (double& v : w.values()) {
    v = std_dev * rng.normal();
  }
  return DendriticLayerSpec(shape, std::move(w), std::vector<double>(rows, 0.0), activation);
}

std::vector<double> forward_point(std::span<const double> x, const Matrix& weights,
                                  std::span<const double> biases, Activation activation) {
  if (weights.cols() != x.size()) {
    throw ShapeError("forward_point: input has " + std::to_string(x.size()) +
                     " entries, weights expect " + std::to_string(weights.cols()));
  }
  if (biases.size() != weights.rows()) {
    throw ShapeError("forward_point: bias length does not match weight rows");
  }
  std::vector<double> out(weights.rows());
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    double acc = biases[i];
    const auto w = weights.row(i);
    for (std::size_t k = 0; k < x.size(); ++k) {
      acc += w[k] * x[k];
    }
    out[i] = activation.apply(acc);
  }
  return out;
}

ForwardRecord forward_dendritic(std::span<const double> x, const DendriticLayerSpec& layer) {
  if (x.size() != layer.n_inputs()) {
    throw ShapeError("forward_dendritic: input has " + std::to_string(x.size()) +
                     " entries, layer expects " + std::to_string(layer.n_inputs()));
  }
  ForwardRecord rec;
  rec.input.assign(x.begin(), x.end());
  rec.pre_activations.resize(layer.n_dendrites());
  rec.outputs.assign(layer.n_neurons(), 0.0);

  const auto& w = layer.weights();
  const auto b = layer.biases();
  const auto& act = layer.activation();
  for (std::size_t j = 0; j < layer.n_dendrites(); ++j) {
    double acc = b[j];
    const auto row = w.row(j);
    for (std::size_t k = 0; k < x.size(); ++k) {
      acc += row[k] * x[k];
    }
    rec.pre_activations[j] = acc;
  }
  const std::size_t dend = layer.dendrites_per_neuron();
  for (std::size_t i = 0; i < layer.n_neurons(); ++i) {
    double h = 0.0;
    for (std::size_t s = 0; s < dend; ++s) {
      h += act.apply(rec.pre_activations[i * dend + s]);
    }
    rec.outputs[i] = h;
  }
  return rec;
}

namespace {

// Both backward paths funnel through here with per-dendrite sigma' values,
// so they share one accumulation order.
Gradients backward_with_derivatives(const DendriticLayerSpec& layer, std::span<const double> x,
                                    std::span<const double> grad_h,
                                    std::span<const double> dsigma) {
  const std::size_t rows = layer.n_dendrites();
  const std::size_t cols = layer.n_inputs();
  Gradients g{Matrix(rows, cols), std::vector<double>(rows, 0.0), std::vector<double>(cols, 0.0)};
  const auto& w = layer.weights();
  for (std::size_t j = 0; j < rows; ++j) {
    const double delta = grad_h[layer.neuron_of(j)] * dsigma[j];
    g.biases[j] = delta;
    auto gw = g.weights.row(j);
    const auto wj = w.row(j);
    for (std::size_t k = 0; k < cols; ++k) {
      gw[k] = delta * x[k];
      g.input[k] += delta * wj[k];
    }
  }
  return g;
}

void check_grad_h(const DendriticLayerSpec& layer, std::span<const double> grad_h) {
  if (grad_h.size() != layer.n_neurons()) {
    throw ShapeError("grad_h has " + std::to_string(grad_h.size()) + " entries, layer has " +
                     std::to_string(layer.n_neurons()) + " neurons");
  }
}

} // namespace

Gradients backward_dendritic(const ForwardRecord& record, const DendriticLayerSpec& layer,
                             std::span<const double> grad_h) {
  if (record.input.size() != layer.n_inputs() ||
      record.pre_activations.size() != layer.n_dendrites() ||
      record.outputs.size() != layer.n_neurons()) {
    throw ConsistencyError("forward record was not produced by this layer");
  }
  check_grad_h(layer, grad_h);
  std::vector<double> dsigma(layer.n_dendrites());
  for (std::size_t j = 0; j < dsigma.size(); ++j) {
    dsigma[j] = layer.activation().derivative(record.pre_activations[j]);
  }
  return backward_with_derivatives(layer, record.input, grad_h, dsigma);
}

GradientMask pack_gradient_mask(const ForwardRecord& record, const DendriticLayerSpec& layer) {
  if (!layer.activation().piecewise_linear()) {
    throw CapabilityError("gradient masks need a piecewise-linear activation, got " +
                          to_string(layer.activation().kind));
  }
  if (record.pre_activations.size() != layer.n_dendrites()) {
    throw ConsistencyError("forward record was not produced by this layer");
  }
  GradientMask mask;
  mask.activation = layer.activation();
  mask.dendrites = layer.n_dendrites();
  mask.words.assign((mask.dendrites + 63) / 64, 0);
  for (std::size_t j = 0; j < mask.dendrites; ++j) {
    if (record.pre_activations[j] > 0.0) {
      mask.words[j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }
  return mask;
}

Gradients backward_from_mask(const GradientMask& mask, const DendriticLayerSpec& layer,
                             std::span<const double> x, std::span<const double> grad_h) {
  if (mask.dendrites != layer.n_dendrites() || mask.words.size() != (mask.dendrites + 63) / 64) {
    throw ShapeError("mask covers " + std::to_string(mask.dendrites) + " dendrites, layer has " +
                     std::to_string(layer.n_dendrites()));
  }
  if (mask.activation != layer.activation()) {
    throw ConsistencyError("mask was packed for a different activation");
  }
  if (x.size() != layer.n_inputs()) {
    throw ShapeError("backward_from_mask: input length does not match layer");
  }
  check_grad_h(layer, grad_h);
  const double off = mask.activation.kind == ActivationKind::LeakyReLU
                         ? mask.activation.negative_slope
                         : 0.0;
  std::vector<double> dsigma(mask.dendrites);
  for (std::size_t j = 0; j < dsigma.size(); ++j) {
    dsigma[j] = mask.bit(j) ? 1.0 : off;
  }
  return backward_with_derivatives(layer, x, grad_h, dsigma);
}

std::uint64_t activation_memory_bits(const LayerShape& shape, const MemoryScheme& scheme) {
  const std::uint64_t neurons = shape.n_neurons;
  const std::uint64_t dendrites = shape.n_neurons * shape.dendrites;
  switch (scheme.kind) {
  case MemoryScheme::Kind::FullPrecision:
    // A point neuron's pre-activation and output coincide in storage.
    return (shape.dendrites > 1 ? dendrites + neurons : neurons) * scheme.bits_per_value;
  case MemoryScheme::Kind::BitMaskPlusOutputs:
    return dendrites * GradientMask::kBitsPerDendrite + neurons * scheme.bits_per_value;
  }
  return 0;
}

namespace {

ActivationKind parse_kind(const std::string& s) {
  if (s == "relu") {
    return ActivationKind::ReLU;
  }
  if (s == "leaky_relu") {
    return ActivationKind::LeakyReLU;
  }
  if (s == "identity") {
    return ActivationKind::Identity;
  }
  throw ValidationError("unknown activation kind '" + s + "'");
}

} // namespace

std::string layer_to_json(const DendriticLayerSpec& layer) {
  nlohmann::ordered_json j;
  j["n_inputs"] = layer.n_inputs();
  j["n_neurons"] = layer.n_neurons();
  j["dendrites_per_neuron"] = layer.dendrites_per_neuron();
  j["activation"] = {{"kind", to_string(layer.activation().kind)},
                     {"negative_slope", layer.activation().negative_slope}};
  const auto w = layer.weights().values();
  j["weights"] = std::vector<double>(w.begin(), w.end());
  const auto b = layer.biases();
  j["biases"] = std::vector<double>(b.begin(), b.end());
  return j.dump(2);
}

DendriticLayerSpec layer_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    LayerShape shape{j.at("n_inputs").get<std::size_t>(), j.at("n_neurons").get<std::size_t>(),
                     j.at("dendrites_per_neuron").get<std::size_t>()};
    const auto& a = j.at("activation");
    Activation act{parse_kind(a.at("kind").get<std::string>()), a.value("negative_slope", 0.0)};
    auto weights = j.at("weights").get<std::vector<double>>();
    auto biases = j.at("biases").get<std::vector<double>>();
    Matrix w(shape.n_neurons * shape.dendrites, shape.n_inputs, std::move(weights));
    return DendriticLayerSpec(shape, std::move(w), std::move(biases), act);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("layer JSON: ") + e.what());
  }
}

} // namespace dwb::dendrite
