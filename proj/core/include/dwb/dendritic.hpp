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

#include "dwb/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

/// Point and dendritic neuron layers: forward pass, reverse-mode gradients,
/// one-bit activation-derivative storage and activation memory accounting.
///
/// A dendritic layer has n_neurons * K dendrites. Dendrite j belongs to
/// neuron j / K; its pre-activation is w_j . x + b_j, and a neuron's output
/// is the sum of sigma(pre) over its K dendrites, taken in ascending
/// dendrite order.
namespace dwb::dendrite {

enum class ActivationKind { ReLU, LeakyReLU, Identity };

struct Activation {
  ActivationKind kind = ActivationKind::ReLU;
  /// Slope for negative inputs; meaningful for LeakyReLU only.
  double negative_slope = 0.0;

  static Activation relu() { return {ActivationKind::ReLU, 0.0}; }
  static Activation leaky_relu(double slope) { return {ActivationKind::LeakyReLU, slope}; }
  static Activation identity() { return {ActivationKind::Identity, 0.0}; }

  double apply(double pre) const noexcept;
  /// sigma'(pre). At pre == 0 the negative branch is taken, so the ReLU
  /// subgradient there is 0.
  double derivative(double pre) const noexcept;
  bool piecewise_linear() const noexcept { return kind != ActivationKind::Identity; }

  friend bool operator==(const Activation&, const Activation&) = default;
};

std::string to_string(ActivationKind kind);

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Shape of a layer for memory accounting and builders.
struct LayerShape {
  std::size_t n_inputs = 0;
  std::size_t n_neurons = 0;
  std::size_t dendrites = 1;
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Weights and biases of a dendritic layer. Immutable after construction;
/// the constructor validates every dimension.
class DendriticLayerSpec {
public:
  DendriticLayerSpec(LayerShape shape, Matrix weights, std::vector<double> biases,
                     Activation activation);

  /// Weights drawn N(0, gain^2 / (n_inputs * K)), zero biases.
  static DendriticLayerSpec random(LayerShape shape, Activation activation, RandomStream& rng,
                                   double gain = 1.0);

  const LayerShape& shape() const noexcept { return shape_; }
  std::size_t n_inputs() const noexcept { return shape_.n_inputs; }
  std::size_t n_neurons() const noexcept { return shape_.n_neurons; }
  std::size_t dendrites_per_neuron() const noexcept { return shape_.dendrites; }
  std::size_t n_dendrites() const noexcept { return shape_.n_neurons * shape_.dendrites; }
  std::size_t neuron_of(std::size_t dendrite) const noexcept { return dendrite / shape_.dendrites; }

  const Matrix& weights() const noexcept { return weights_; }
  std::span<const double> biases() const noexcept { return biases_; }
  const Activation& activation() const noexcept { return activation_; }

  friend bool operator==(const DendriticLayerSpec&, const DendriticLayerSpec&) = default;

private:
  LayerShape shape_;
  Matrix weights_;
  std::vector<double> biases_;
  Activation activation_;
};

struct ForwardRecord {
  std::vector<double> input;
  std::vector<double> pre_activations; ///< one per dendrite
  std::vector<double> outputs;         ///< one per neuron
};

struct Gradients {
  Matrix weights;
  std::vector<double> biases;
  std::vector<double> input;
};

/// Stored activation derivatives, one bit per dendrite.
///
/// Encoding: bit j is 1 iff pre_activation[j] > 0. ReLU decodes 1 -> 1 and
/// 0 -> 0; LeakyReLU decodes 1 -> 1 and 0 -> negative_slope. Bits are packed
/// little-endian into 64-bit words (dendrite j lives in word j / 64, bit j % 64).
struct GradientMask {
  static constexpr std::size_t kBitsPerDendrite = 1;

  Activation activation;
  std::size_t dendrites = 0;
  std::vector<std::uint64_t> words;

  bool bit(std::size_t j) const noexcept { return (words[j / 64] >> (j % 64)) & 1u; }
  std::size_t storage_bits() const noexcept { return dendrites * kBitsPerDendrite; }
};

/// h_i = sigma(sum_k W_ik x_k + b_i). Throws ShapeError on mismatch.
std::vector<double> forward_point(std::span<const double> x, const Matrix& weights,
                                  std::span<const double> biases, Activation activation);

ForwardRecord forward_dendritic(std::span<const double> x, const DendriticLayerSpec& layer);

/// Reverse-mode pass: grad_h is dL/dh per neuron. Throws ConsistencyError if
/// the record does not match the layer, ShapeError if grad_h is mis-sized.
Gradients backward_dendritic(const ForwardRecord& record, const DendriticLayerSpec& layer,
                             std::span<const double> grad_h);

/// Throws CapabilityError for activations that are not piecewise linear.
GradientMask pack_gradient_mask(const ForwardRecord& record, const DendriticLayerSpec& layer);

/// Same result as backward_dendritic, bit for bit, using only the mask and x.
Gradients backward_from_mask(const GradientMask& mask, const DendriticLayerSpec& layer,
                             std::span<const double> x, std::span<const double> grad_h);

struct MemoryScheme {
  enum class Kind { FullPrecision, BitMaskPlusOutputs };
  Kind kind = Kind::FullPrecision;
  std::uint64_t bits_per_value = 16;

  static MemoryScheme full_precision(std::uint64_t bits) { return {Kind::FullPrecision, bits}; }
  static MemoryScheme bit_mask(std::uint64_t bits) { return {Kind::BitMaskPlusOutputs, bits}; }
};

/// Bits held for the backward pass of one layer and one sample.
///
/// FullPrecision keeps the neuron outputs and, when K > 1, every dendritic
/// pre-activation. BitMaskPlusOutputs keeps the neuron outputs plus one mask
/// bit per dendrite. n_inputs does not enter: inputs belong to the previous
/// layer's budget.
std::uint64_t activation_memory_bits(const LayerShape& shape, const MemoryScheme& scheme);

/// JSON schema:
///   {"n_inputs": u, "n_neurons": u, "dendrites_per_neuron": u,
///    "activation": {"kind": "relu"|"leaky_relu"|"identity", "negative_slope": r},
///    "weights": [row-major, (n_neurons*K) x n_inputs], "biases": [n_neurons*K]}
std::string layer_to_json(const DendriticLayerSpec& layer);
DendriticLayerSpec layer_from_json(std::string_view text);

} // namespace dwb::dendrite
