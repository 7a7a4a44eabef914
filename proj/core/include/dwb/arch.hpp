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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dwb::arch {

/// Position of a parametric layer relative to the main path. Input and
/// penultimate layers keep sqrt(K) dendrites under scaling; interior layers
/// get K; shortcuts and the output layer stay point layers.
enum class Role { Input, Interior, Shortcut, Penultimate, Output };

std::string to_string(Role r);

struct Conv {
  std::string name;
  std::uint64_t in = 0;
  std::uint64_t out = 0;
  /// Unrounded channel counts after scaling; equal to in/out for a base
  /// descriptor.
  double ideal_in = 0.0;
  double ideal_out = 0.0;
  std::uint64_t kernel = 1;
  std::uint64_t stride = 1;
  std::uint64_t padding = 0;
  std::uint64_t dendrites = 1;
  bool bias = false;
  bool batchnorm = false;
  Role role = Role::Interior;
};

struct Linear {
  std::string name;
  std::uint64_t in = 0;
  std::uint64_t out = 0;
  double ideal_in = 0.0;
  double ideal_out = 0.0;
  std::uint64_t dendrites = 1;
  bool bias = true;
  Role role = Role::Interior;
};

struct MaxPool {
  std::string name;
  std::uint64_t kernel = 2;
  std::uint64_t stride = 2;
  std::uint64_t padding = 0;
};

struct GlobalAvgPool {
  std::string name;
};

enum class Shortcut { Identity, Projection, Tile };

/// Basic residual block: relu(conv2(relu(conv1(x))) + shortcut(x)). A Tile
/// shortcut repeats the input channels to the block's output width without
/// parameters.
struct ResidualBlock {
  std::string name;
  Conv conv1;
  Conv conv2;
  Shortcut shortcut = Shortcut::Identity;
  std::optional<Conv> projection;
};

using Layer = std::variant<Conv, Linear, MaxPool, GlobalAvgPool, ResidualBlock>;

struct InputShape {
  std::uint64_t channels = 0;
  std::uint64_t height = 1;
  std::uint64_t width = 1;
};

struct ArchDescriptor {
  std::string name;
  InputShape input;
  std::vector<Layer> layers;
};

/// Checks channel chaining, positive sizes and shortcut consistency.
/// Throws ShapeError or ArgumentError.
void validate(const ArchDescriptor& arch);

/// Recomputes roles from layer order: first main-path layer is Input, last
/// is Output, the one before it Penultimate; projections are Shortcut.
void assign_roles(ArchDescriptor& arch);

bool is_point_model(const ArchDescriptor& arch);

/// Equal-complexity dendritic variant. Channels of input, interior and
/// shortcut layers are multiplied by width_factor / sqrt(K) and rounded to
/// nearest; the penultimate layer's output and the output layer's input are
/// multiplied by width_factor. An identity shortcut around the penultimate
/// layer becomes a Tile shortcut.
ArchDescriptor scale_architecture(const ArchDescriptor& base, std::uint64_t K,
                                  double width_factor = 1.0);

/// Layers of `b` appended to `a`; `b` must start where `a` ends.
ArchDescriptor concatenate(const ArchDescriptor& a, const ArchDescriptor& b);

struct LayerComplexity {
  std::string name;
  std::string kind;
  std::string role;
  std::uint64_t dendrites = 1;
  std::uint64_t in = 0;
  std::uint64_t out = 0;
  std::uint64_t params = 0;
  double ideal_params = 0.0;
  /// Multiply-accumulates in half-MAC units: one multiply-add or two
  /// additions count as one MAC.
  std::uint64_t half_macs = 0;

  double macs() const noexcept { return static_cast<double>(half_macs) / 2.0; }
};

/// MAC convention: convolution and linear products count one MAC each; a
/// bias add, a residual add, each of the K - 1 dendritic sums and each sum
/// inside global average pooling count half a MAC; batch norm counts one
/// MAC per output element; ReLU and max pooling are free.
struct ComplexityReport {
  std::vector<LayerComplexity> layers;
  std::uint64_t total_params = 0;
  double total_ideal_params = 0.0;
  std::uint64_t total_half_macs = 0;
  InputShape output;

  double total_macs() const noexcept { return static_cast<double>(total_half_macs) / 2.0; }
};

ComplexityReport count_macs(const ArchDescriptor& arch, const InputShape& input);
ComplexityReport count_params(const ArchDescriptor& arch);

/// Ratio of neuron (channel) count in input, interior and shortcut layers
/// to the baseline's. Throws ArgumentError when layer lists do not align.
double psi(const ArchDescriptor& arch, const ArchDescriptor& baseline);

/// Columns: layer, kind, role, K, in, out, params, ideal_params, macs.
CsvTable complexity_csv(const ComplexityReport& report);

/// Accepts a layer-list document ("format": "layers") or a basic-block
/// ResNet table ("format": "resnet-basic").
ArchDescriptor arch_from_json(std::string_view text);
std::string arch_to_json(const ArchDescriptor& arch);
ArchDescriptor load_architecture(const std::filesystem::path& path);

/// Looks for `<name>.json` in $DWB_DATA_DIR, the source tree and the
/// install prefix, in that order.
std::filesystem::path find_data_file(std::string_view name);
ArchDescriptor builtin_architecture(std::string_view name);

} // namespace dwb::arch
