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

#include <cmath>
#include <cstdint>
#include <optional>

namespace dwb {

/// floor(sqrt(v)) computed without floating-point rounding errors.
inline std::uint64_t isqrt_floor(std::uint64_t v) noexcept {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && r * r > v) {
    --r;
  }
  while ((r + 1) * (r + 1) <= v) {
    ++r;
  }
  return r;
}

/// sqrt(v) when v is a perfect square.
inline std::optional<std::uint64_t> exact_sqrt(std::uint64_t v) noexcept {
  const std::uint64_t r = isqrt_floor(v);
  if (r * r != v) {
    return std::nullopt;
  }
  return r;
}

} // namespace dwb
