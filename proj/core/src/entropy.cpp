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

#include "dwb/entropy.hpp"

#include "dwb/error.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

namespace dwb::entropy {

namespace {

void check_distribution(std::span<const double> p) {
  if (p.empty()) {
    throw ValidationError("distribution has no outcomes");
  }
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("probabilities must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

double entropy_unchecked(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) {
      h -= v * std::log2(v);
    }
  }
  return h;
}

// Support indices grouped by merged sum outcome, groups in ascending sum.
std::vector<std::vector<std::size_t>> sum_groups(const DiscreteJoint& joint, double tolerance) {
  std::vector<std::size_t> order(joint.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> sums(joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    sums[i] = joint.sum_of(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sums[a] < sums[b]; });
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || sums[order[k]] - sums[order[k - 1]] > tolerance) {
      groups.emplace_back();
    }
    groups.back().push_back(order[k]);
  }
  return groups;
}

} // namespace

DiscreteJoint::DiscreteJoint(std::size_t K, std::vector<std::vector<double>> support,
                             std::vector<double> probabilities)
    : k_(K), support_(std::move(support)), probs_(std::move(probabilities)) {
  if (k_ == 0) {
    throw ValidationError("a joint needs at least one component");
  }
  if (support_.size() != probs_.size()) {
    throw ValidationError("support and probability lists differ in length");
  }
  for (const auto& t : support_) {
    if (t.size() != k_) {
      throw ValidationError("support tuple of length " + std::to_string(t.size()) +
                            ", expected " + std::to_string(k_));
    }
    for (double v : t) {
      if (!std::isfinite(v)) {
        throw ValidationError("support values must be finite");
      }
    }
  }
  check_distribution(probs_);
  std::vector<const std::vector<double>*> sorted;
  sorted.reserve(support_.size());
  for (const auto& t : support_) {
    sorted.push_back(&t);
  }
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return *a < *b; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (*sorted[i] == *sorted[i - 1]) {
      throw ValidationError("support tuples must be distinct");
    }
  }
}

double DiscreteJoint::sum_of(std::size_t i) const {
  double s = 0.0;
  for (double v : support_.at(i)) {
    s += v;
  }
  return s;
}

double entropy(std::span<const double> probabilities) {
  check_distribution(probabilities);
  return entropy_unchecked({probabilities.begin(), probabilities.end()});
}

double joint_entropy(const DiscreteJoint& joint) {
  return entropy_unchecked({joint.probabilities().begin(), joint.probabilities().end()});
}

Distribution sum_distribution(const DiscreteJoint& joint, double tolerance) {
  Distribution d;
  for (const auto& group : sum_groups(joint, tolerance)) {
    double q = 0.0;
    for (std::size_t i : group) {
      q += joint.probability(i);
    }
    d.values.push_back(joint.sum_of(group.front()));
    d.probabilities.push_back(q);
  }
  return d;
}

double entropy_of_sum(const DiscreteJoint& joint) {
  return entropy_unchecked(sum_distribution(joint).probabilities);
}

ConditionalEntropy conditional_entropy_given_sum(const DiscreteJoint& joint) {
  ConditionalEntropy c;
  c.via_identity = joint_entropy(joint) - entropy_of_sum(joint);
  for (const auto& group : sum_groups(joint, kMergeTolerance)) {
    double q = 0.0;
    for (std::size_t i : group) {
      q += joint.probability(i);
    }
    if (q <= 0.0) {
      continue;
    }
    std::vector<double> cond;
    cond.reserve(group.size());
    for (std::size_t i : group) {
      cond.push_back(joint.probability(i) / q);
    }
    c.direct += q * entropy_unchecked(std::move(cond));
  }
  return c;
}

double sum_given_components_entropy(const DiscreteJoint& joint) {
  // Given the tuple, the sum is a single value with probability 1.
  double h = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    h += joint.probability(i) * entropy_unchecked({1.0});
  }
  return h;
}

bool verify_lemma1(const DiscreteJoint& joint) {
  return sum_given_components_entropy(joint) < 1e-12;
}

bool sum_injective(const DiscreteJoint& joint, double tolerance) {
  for (const auto& group : sum_groups(joint, tolerance)) {
    if (group.size() > 1) {
      return false;
    }
  }
  return true;
}

namespace {

std::vector<double> distinct_values(std::size_t count, bool integers, RandomStream& rng) {
  std::vector<double> values;
  while (values.size() < count) {
    const double v = integers ? static_cast<double>(rng.uniform_index(count + 3))
                              : 4.0 * rng.uniform() - 2.0;
    if (std::find(values.begin(), values.end(), v) == values.end()) {
      values.push_back(v);
    }
  }
  return values;
}

DiscreteJoint joint_over_product(std::size_t K, const std::vector<std::vector<double>>& values,
                                 RandomStream& rng) {
  std::vector<std::vector<double>> support;
  std::vector<std::size_t> idx(K, 0);
  for (;;) {
    std::vector<double> t(K);
    for (std::size_t j = 0; j < K; ++j) {
      t[j] = values[j][idx[j]];
    }
    support.push_back(std::move(t));
    std::size_t j = 0;
    while (j < K && ++idx[j] == values[j].size()) {
      idx[j++] = 0;
    }
    if (j == K) {
      break;
    }
  }
  // Keep each tuple with probability 1/2; always keep at least one.
  std::vector<std::vector<double>> kept;
  for (auto& t : support) {
    if (rng.uniform() < 0.5) {
      kept.push_back(std::move(t));
    }
  }
  if (kept.empty()) {
    kept.push_back(support[rng.uniform_index(support.size())]);
  }
  std::vector<double> w(kept.size());
  double total = 0.0;
  for (double& v : w) {
    v = 0.05 + rng.uniform();
    total += v;
  }
  for (double& v : w) {
    v /= total;
  }
  return DiscreteJoint(K, std::move(kept), std::move(w));
}

} // namespace

DiscreteJoint random_joint(std::size_t K, std::size_t max_values, RandomStream& rng) {
  if (K == 0 || max_values == 0) {
    throw ArgumentError("random_joint needs K >= 1 and max_values >= 1");
  }
  const bool integers = rng.uniform() < 0.5;
  std::vector<std::vector<double>> values(K);
  for (auto& v : values) {
    v = distinct_values(1 + rng.uniform_index(max_values), integers, rng);
  }
  return joint_over_product(K, values, rng);
}

DiscreteJoint random_injective_joint(std::size_t K, std::size_t max_values, RandomStream& rng) {
  if (K == 0 || max_values == 0) {
    throw ArgumentError("random_injective_joint needs K >= 1 and max_values >= 1");
  }
  const double base = static_cast<double>(max_values);
  std::vector<std::vector<double>> values(K);
  double scale = 1.0;
  for (auto& v : values) {
    std::vector<double> digits;
    while (digits.size() < 1 + rng.uniform_index(max_values)) {
      const double d = static_cast<double>(rng.uniform_index(max_values));
      if (std::find(digits.begin(), digits.end(), d) == digits.end()) {
        digits.push_back(d);
      }
    }
    for (double d : digits) {
      v.push_back(d * scale);
    }
    scale *= base;
  }
  return joint_over_product(K, values, rng);
}

VerifyReport verify_entropy_identity(std::uint64_t seed, std::size_t trials, std::size_t max_K,
                            std::size_t max_values) {
  if (max_K == 0 || max_values == 0) {
    throw ArgumentError("max_K and max_values must be positive");
  }
  VerifyReport r;
  r.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream rng(seed, t);
    const std::size_t K = 1 + rng.uniform_index(max_K);
    bool ok = true;
    for (int pass = 0; pass < 2; ++pass) {
      const DiscreteJoint joint = pass == 0 ? random_joint(K, max_values, rng)
                                            : random_injective_joint(K, max_values, rng);
      const double h_joint = joint_entropy(joint);
      const double h_sum = entropy_of_sum(joint);
      const ConditionalEntropy cond = conditional_entropy_given_sum(joint);
      const double residual = std::abs(h_sum - (h_joint - cond.direct));
      const double gap = std::abs(cond.via_identity - cond.direct);
      const double lemma = sum_given_components_entropy(joint);
      r.worst_identity_residual = std::max(r.worst_identity_residual, residual);
      r.worst_dual_path_gap = std::max(r.worst_dual_path_gap, gap);
      r.worst_sum_given_components = std::max(r.worst_sum_given_components, lemma);
      if (h_sum > h_joint) {
        ++r.bound_violations;
        ok = false;
      }
      if ((h_sum == h_joint) != sum_injective(joint)) {
        ++r.equality_mismatches;
        ok = false;
      }
      if (residual >= 1e-12 || gap >= 1e-12 || !verify_lemma1(joint)) {
        ok = false;
      }
    }
    if (!ok) {
      ++r.failures;
    }
  }
  return r;
}

std::string joint_to_json(const DiscreteJoint& joint) {
  nlohmann::ordered_json j;
  j["K"] = joint.K();
  nlohmann::json support = nlohmann::json::array();
  for (std::size_t i = 0; i < joint.size(); ++i) {
    support.push_back(joint.tuple(i));
  }
  j["support"] = std::move(support);
  j["probabilities"] = std::vector<double>(joint.probabilities().begin(),
                                           joint.probabilities().end());
  return j.dump(2);
}

DiscreteJoint joint_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    return DiscreteJoint(j.at("K").get<std::size_t>(),
                         j.at("support").get<std::vector<std::vector<double>>>(),
                         j.at("probabilities").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("joint JSON: ") + e.what());
  }
}

} // namespace dwb::entropy
