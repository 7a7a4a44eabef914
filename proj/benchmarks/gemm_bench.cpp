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

#include <benchmark/benchmark.h>

#include "dwb/gemm.hpp"

namespace {

using namespace dwb::gemm;

void BM_BuildSchedule(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const GemmShape shape{n, n, n, 1};
  const TilePlan plan{4, 4, 8, 4, Ordering::Grouped};
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_schedule(shape, plan));
  }
}
BENCHMARK(BM_BuildSchedule)->RangeMultiplier(2)->Range(64, 256);

void BM_SimulateCache(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const GemmShape shape{n, n, n, 1};
  const TilePlan plan{4, 4, 8, 4, Ordering::Grouped};
  const auto schedule = build_schedule(shape, plan);
  const auto policy = static_cast<Policy>(state.range(1));
  const CacheModel cache{grouped_capacity(shape, plan), policy};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_cache(schedule, cache));
  }
}
BENCHMARK(BM_SimulateCache)
    ->ArgsProduct({{64, 128, 256},
                   {static_cast<int>(Policy::LRU), static_cast<int>(Policy::Explicit)}});

} // namespace
