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

#include <array>
#include <cstdint>

namespace dwb {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The output block is a pure function of (key, counter), so a stream is
/// fully described by a 64-bit seed and a 64-bit stream id and reproduces
/// bit-for-bit on every platform. Experiments derive one stream per trial,
/// pattern or grid cell, which makes parallel execution order irrelevant.
class Philox4x32 {
public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key) noexcept;
};

/// Sequential view over one Philox stream: counter words 2..3 hold the
/// stream id, words 0..1 are incremented per 128-bit block.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller (no cached second value, so the
  /// sequence depends only on how many draws were made).
  double normal() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Block buffer_{};
  int used_ = 4;
};

} // namespace dwb
