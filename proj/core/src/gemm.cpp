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

#include "dwb/gemm.hpp"

#include "dwb/error.hpp"
#include "dwb/intmath.hpp"

#include <limits>
#include <list>
#include <queue>
#include <unordered_map>

namespace dwb::gemm {

namespace {

std::string dims(const GemmShape& s) {
  return "M=" + std::to_string(s.M) + " N=" + std::to_string(s.N) + " L=" +
         std::to_string(s.L) + " K=" + std::to_string(s.K);
}

double row_major_reads(const EffectiveShape& e, const TilePlan& p) {
  return static_cast<double>((p.B_M + p.B_N) * e.l * (e.m / p.B_M) * (e.n / p.B_N));
}

double grouped_reads(const EffectiveShape& e, const TilePlan& p) {
  const double m = static_cast<double>(e.m);
  const double n = static_cast<double>(e.n);
  const double l = static_cast<double>(e.l);
  return n * l * m / static_cast<double>(p.B_M * p.G) + m * l;
}

std::uint64_t key_of(const BlockAccess& a) {
  return (static_cast<std::uint64_t>(a.operand) << 62) | (static_cast<std::uint64_t>(a.row) << 31) |
         a.col;
}

} // namespace

EffectiveShape effective_shape(const GemmShape& s) {
  if (s.M == 0 || s.N == 0 || s.L == 0 || s.K == 0) {
    throw ArgumentError("GEMM dimensions must be positive (" + dims(s) + ")");
  }
  const auto root = exact_sqrt(s.K);
  if (!root) {
    throw ArgumentError("K must be a perfect square (" + dims(s) + ")");
  }
  if (s.L % *root != 0) {
    throw ArgumentError("sqrt(K) must divide L (" + dims(s) + ")");
  }
  if (s.N % *root != 0) {
    throw ArgumentError("sqrt(K) must divide N so outputs are whole (" + dims(s) + ")");
  }
  return {s.M, s.N * *root, s.L / *root, s.K};
}

std::string to_string(Ordering o) { return o == Ordering::RowMajor ? "row_major" : "grouped"; }

std::string to_string(Policy p) {
  switch (p) {
  case Policy::None:
    return "none";
  case Policy::LRU:
    return "lru";
  case Policy::Explicit:
    return "explicit";
  }
  return "none";
}

Ordering parse_ordering(const std::string& s) {
  if (s == "row_major") {
    return Ordering::RowMajor;
  }
  if (s == "grouped") {
    return Ordering::Grouped;
  }
  throw ValidationError("unknown ordering '" + s + "' (expected row_major or grouped)");
}

Policy parse_policy(const std::string& s) {
  if (s == "none") {
    return Policy::None;
  }
  if (s == "lru") {
    return Policy::LRU;
  }
  if (s == "explicit") {
    return Policy::Explicit;
  }
  throw ValidationError("unknown cache policy '" + s + "' (expected none, lru or explicit)");
}

void validate(const GemmShape& shape, const TilePlan& plan) {
  const EffectiveShape e = effective_shape(shape);
  if (plan.B_M == 0 || plan.B_N == 0 || plan.B_L == 0 || plan.G == 0) {
    throw ArgumentError("block sizes and group size must be positive");
  }
  if (e.m % plan.B_M != 0 || e.n % plan.B_N != 0 || e.l % plan.B_L != 0) {
    throw ArgumentError("blocks " + std::to_string(plan.B_M) + "x" + std::to_string(plan.B_N) +
                        "x" + std::to_string(plan.B_L) + " do not tile m=" +
                        std::to_string(e.m) + " n=" + std::to_string(e.n) +
                        " l=" + std::to_string(e.l));
  }
  constexpr std::uint64_t limit = std::numeric_limits<std::uint32_t>::max();
  if (e.m / plan.B_M > limit || e.n / plan.B_N > limit || e.l / plan.B_L > limit ||
      plan.B_M * plan.B_L > limit || plan.B_L * plan.B_N > limit) {
    throw CapacityError("schedule indices exceed 32 bits");
  }
}

TrafficReport analytic_costs(const GemmShape& shape, const TilePlan& plan) {
  validate(shape, plan);
  const EffectiveShape e = effective_shape(shape);
  TrafficReport r;
  r.analytic_reads =
      plan.ordering == Ordering::RowMajor ? row_major_reads(e, plan) : grouped_reads(e, plan);
  r.analytic_writes = static_cast<double>(e.m * e.n / e.reduce);
  return r;
}

double grouped_reads_at_capacity(const GemmShape& shape, std::uint64_t B_N, double Q) {
  const EffectiveShape e = effective_shape(shape);
  const double m = static_cast<double>(e.m);
  const double n = static_cast<double>(e.n);
  const double l = static_cast<double>(e.l);
  const double rows = Q / l - static_cast<double>(B_N);
  if (rows <= 0.0) {
    throw ArgumentError("capacity cannot hold one block-column of B");
  }
  return n * l * m / rows + m * l;
}

double grouped_reads_approx(const GemmShape& shape, double Q) {
  const EffectiveShape e = effective_shape(shape);
  const double m = static_cast<double>(e.m);
  const double n = static_cast<double>(e.n);
  const double l = static_cast<double>(e.l);
  return n * l * l * m / Q + m * l;
}

std::uint64_t grouped_capacity(const GemmShape& shape, const TilePlan& plan) {
  const EffectiveShape e = effective_shape(shape);
  return (plan.G * plan.B_M + plan.B_N) * e.l;
}

std::uint64_t BlockSchedule::steps() const noexcept {
  std::uint64_t n = 0;
  for (const auto& a : accesses) {
    n += a.operand == Operand::B ? 1 : 0;
  }
  return n;
}

BlockSchedule build_schedule(const GemmShape& shape, const TilePlan& plan) {
  validate(shape, plan);
  const EffectiveShape e = effective_shape(shape);
  const auto mb = static_cast<std::uint32_t>(e.m / plan.B_M);
  const auto nb = static_cast<std::uint32_t>(e.n / plan.B_N);
  const auto lb = static_cast<std::uint32_t>(e.l / plan.B_L);
  const auto a_elems = static_cast<std::uint32_t>(plan.B_M * plan.B_L);
  const auto b_elems = static_cast<std::uint32_t>(plan.B_L * plan.B_N);

  // Outputs finished by each block-column: groups whose last column lands in it.
  std::vector<std::uint32_t> finished(nb, 0);
  for (std::uint64_t j = 0; j < e.n; ++j) {
    if ((j + 1) % e.reduce == 0) {
      finished[j / plan.B_N] += static_cast<std::uint32_t>(plan.B_M);
    }
  }

  BlockSchedule s{shape, plan, {}};
  s.accesses.reserve(static_cast<std::size_t>(mb) * nb * (2 * lb + 1));
  auto visit = [&](std::uint32_t r, std::uint32_t c) {
    for (std::uint32_t k = 0; k < lb; ++k) {
      s.accesses.push_back({Operand::A, r, k, a_elems});
      s.accesses.push_back({Operand::B, k, c, b_elems});
    }
    s.accesses.push_back({Operand::C, r, c, finished[c]});
  };
  if (plan.ordering == Ordering::RowMajor) {
    for (std::uint32_t r = 0; r < mb; ++r) {
      for (std::uint32_t c = 0; c < nb; ++c) {
        visit(r, c);
      }
    }
  } else {
    const auto g = static_cast<std::uint32_t>(plan.G);
    for (std::uint32_t first = 0; first < mb; first += g) {
      const std::uint32_t last = std::min(mb, first + g);
      for (std::uint32_t c = 0; c < nb; ++c) {
        for (std::uint32_t r = first; r < last; ++r) {
          visit(r, c);
        }
      }
    }
  }
  return s;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> c_block_order(const BlockSchedule& s) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> order;
  for (const auto& a : s.accesses) {
    if (a.operand == Operand::C) {
      order.emplace_back(a.row, a.col);
    }
  }
  return order;
}

namespace {

std::uint64_t reads_uncached(const BlockSchedule& s) {
  std::uint64_t reads = 0;
  for (const auto& a : s.accesses) {
    if (a.operand != Operand::C) {
      reads += a.elements;
    }
  }
  return reads;
}

std::uint64_t reads_lru(const BlockSchedule& s, std::uint64_t capacity) {
  std::list<std::pair<std::uint64_t, std::uint32_t>> order; // front = most recent
  std::unordered_map<std::uint64_t, decltype(order)::iterator> where;
  std::uint64_t used = 0;
  std::uint64_t reads = 0;
  for (const auto& a : s.accesses) {
    if (a.operand == Operand::C) {
      continue;
    }
    const std::uint64_t key = key_of(a);
    if (auto it = where.find(key); it != where.end()) {
      order.splice(order.begin(), order, it->second);
      continue;
    }
    reads += a.elements;
    if (a.elements > capacity) {
      continue;
    }
    while (used + a.elements > capacity) {
      used -= order.back().second;
      where.erase(order.back().first);
      order.pop_back();
    }
    order.emplace_front(key, a.elements);
    where[key] = order.begin();
    used += a.elements;
  }
  return reads;
}

// Belady's MIN with variable block sizes: evict the resident block whose
// next use is furthest away; blocks never used again are not cached.
std::uint64_t reads_explicit(const BlockSchedule& s, std::uint64_t capacity) {
  constexpr std::size_t never = std::numeric_limits<std::size_t>::max();
  const std::size_t n = s.accesses.size();
  std::vector<std::size_t> next_use(n, never);
  {
    std::unordered_map<std::uint64_t, std::size_t> seen;
    for (std::size_t i = n; i-- > 0;) {
      const auto& a = s.accesses[i];
      if (a.operand == Operand::C) {
        continue;
      }
      const std::uint64_t key = key_of(a);
      auto [it, inserted] = seen.try_emplace(key, i);
      if (!inserted) {
        next_use[i] = it->second;
        it->second = i;
      }
    }
  }

  struct Resident {
    std::size_t next;
    std::uint32_t size;
  };
  std::unordered_map<std::uint64_t, Resident> cache;
  std::priority_queue<std::pair<std::size_t, std::uint64_t>> heap; // furthest first
  std::uint64_t used = 0;
  std::uint64_t reads = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = s.accesses[i];
    if (a.operand == Operand::C) {
      continue;
    }
    const std::uint64_t key = key_of(a);
    if (auto it = cache.find(key); it != cache.end()) {
      it->second.next = next_use[i];
      heap.emplace(next_use[i], key);
      continue;
    }
    reads += a.elements;
    if (a.elements > capacity || next_use[i] == never) {
      continue;
    }
    while (used + a.elements > capacity) {
      const auto [when, victim] = heap.top();
      heap.pop();
      auto it = cache.find(victim);
      if (it != cache.end() && it->second.next == when) {
        used -= it->second.size;
        cache.erase(it);
      }
    }
    cache.emplace(key, Resident{next_use[i], a.elements});
    heap.emplace(next_use[i], key);
    used += a.elements;
  }
  return reads;
}

} // namespace

TrafficReport simulate_cache(const BlockSchedule& schedule, const CacheModel& cache) {
  TrafficReport r = analytic_costs(schedule.shape, schedule.plan);
  if (cache.policy == Policy::None) {
    r.analytic_reads = row_major_reads(effective_shape(schedule.shape), schedule.plan);
  }
  switch (cache.policy) {
  case Policy::None:
    r.reads_global = reads_uncached(schedule);
    break;
  case Policy::LRU:
    r.reads_global = reads_lru(schedule, cache.capacity);
    break;
  case Policy::Explicit:
    r.reads_global = reads_explicit(schedule, cache.capacity);
    break;
  }
  for (const auto& a : schedule.accesses) {
    if (a.operand == Operand::C) {
      r.writes_global += a.elements;
    }
  }
  return r;
}

std::uint64_t auto_group(const GemmShape& shape, const TilePlan& plan, std::uint64_t Q) {
  const EffectiveShape e = effective_shape(shape);
  if (plan.B_M == 0 || e.m % plan.B_M != 0) {
    throw ArgumentError("B_M must divide m");
  }
  const std::uint64_t rows_fit = Q / e.l;
  if (rows_fit <= plan.B_N) {
    return 1;
  }
  const std::uint64_t g_max = (rows_fit - plan.B_N) / plan.B_M;
  const std::uint64_t mb = e.m / plan.B_M;
  for (std::uint64_t g = std::min(g_max, mb); g >= 1; --g) {
    if (mb % g == 0) {
      return g;
    }
  }
  return 1;
}

std::vector<SweepRow> dendritic_reduction_sweep(const GemmShape& base,
                                                std::span<const std::uint64_t> K_values,
                                                const CacheModel& cache, TilePlan plan) {
  if (K_values.empty()) {
    throw ArgumentError("sweep needs at least one K");
  }
  const bool auto_g = plan.G == 0;
  plan.ordering = Ordering::Grouped;
  std::vector<SweepRow> rows;
  for (std::uint64_t K : K_values) {
    GemmShape shape = base;
    shape.K = K;
    TilePlan p = plan;
    if (auto_g) {
      p.G = auto_group(shape, p, cache.capacity);
    }
    const BlockSchedule schedule = build_schedule(shape, p);
    SweepRow row{shape, p, cache, simulate_cache(schedule, cache), 1.0, 1.0};
    if (!rows.empty()) {
      const auto& ref = rows.front().traffic;
      row.read_ratio = static_cast<double>(row.traffic.reads_global) /
                       static_cast<double>(ref.reads_global);
      row.write_ratio = static_cast<double>(row.traffic.writes_global) /
                        static_cast<double>(ref.writes_global);
    }
    rows.push_back(row);
  }
  return rows;
}

CsvTable sweep_csv(std::span<const SweepRow> rows) {
  CsvTable t({"M", "N", "L", "K", "B_M", "B_N", "G", "Q", "policy", "reads_sim",
              "reads_analytic", "writes_sim", "writes_analytic", "read_ratio", "write_ratio"});
  for (const auto& r : rows) {
    t.add_row({r.shape.M, r.shape.N, r.shape.L, r.shape.K, r.plan.B_M, r.plan.B_N, r.plan.G,
               r.cache.capacity, to_string(r.cache.policy), r.traffic.reads_global,
               r.traffic.analytic_reads, r.traffic.writes_global, r.traffic.analytic_writes,
               r.read_ratio, r.write_ratio});
  }
  return t;
}

} // namespace dwb::gemm
