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

namespace dwb::entropy {

/// Sum values closer than this are treated as the same outcome.
inline constexpr double kMergeTolerance = 1e-12;
/// Allowed deviation of total probability from 1.
inline constexpr double kNormTolerance = 1e-12;

/// Finite joint distribution of K dendritic outputs (d_1, ..., d_K).
class DiscreteJoint {
public:
  /// Throws ValidationError on ragged tuples, negative or unnormalized
  /// probabilities, or repeated support tuples.
  DiscreteJoint(std::size_t K, std::vector<std::vector<double>> support,
                std::vector<double> probabilities);

  std::size_t K() const noexcept { return k_; }
  std::size_t size() const noexcept { return support_.size(); }
  const std::vector<double>& tuple(std::size_t i) const { return support_.at(i); }
  double probability(std::size_t i) const { return probs_.at(i); }
  std::span<const double> probabilities() const noexcept { return probs_; }
  double sum_of(std::size_t i) const;

private:
  std::size_t k_;
  std::vector<std::vector<double>> support_;
  std::vector<double> probs_;
};

/// One-dimensional distribution, values ascending.
struct Distribution {
  std::vector<double> values;
  std::vector<double> probabilities;
};

/// Shannon entropy in bits, 0 log 0 = 0. Terms are added in ascending
/// probability order, so the result does not depend on outcome order.
/// Throws ValidationError for negative or unnormalized input.
double entropy(std::span<const double> probabilities);
double joint_entropy(const DiscreteJoint& joint);

/// Pushforward of the joint under (d_1..d_K) -> sum d_j. Sorted sums whose
/// gap to the previous one is within `tolerance` share an outcome.
Distribution sum_distribution(const DiscreteJoint& joint, double tolerance = kMergeTolerance);
double entropy_of_sum(const DiscreteJoint& joint);

struct ConditionalEntropy {
  double via_identity = 0.0; ///< H(joint) - H(sum)
  double direct = 0.0;       ///< sum_s P(s) H(components | sum = s)
};

/// H(d_1, ..., d_K | sum d_j), computed both ways.
ConditionalEntropy conditional_entropy_given_sum(const DiscreteJoint& joint);

/// H(sum d_j | d_1, ..., d_K), evaluated from the conditional distribution
/// of the sum at every support tuple.
double sum_given_components_entropy(const DiscreteJoint& joint);
bool verify_lemma1(const DiscreteJoint& joint);

/// True when no two support tuples share a sum outcome.
bool sum_injective(const DiscreteJoint& joint, double tolerance = kMergeTolerance);

/// Random joint: component j takes up to `max_values` distinct values and
/// the support is a nonempty random subset of their product. Half the draws
/// use small integers so that sums collide.
DiscreteJoint random_joint(std::size_t K, std::size_t max_values, RandomStream& rng);

/// Random joint whose sum is injective: component j uses values
/// v * base^j with base larger than every v.
DiscreteJoint random_injective_joint(std::size_t K, std::size_t max_values, RandomStream& rng);

struct VerifyReport {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst_identity_residual = 0.0;    ///< |H(sum) - (H(joint) - H(joint|sum))|
  double worst_dual_path_gap = 0.0;        ///< |identity - direct| conditional entropy
  double worst_sum_given_components = 0.0; ///< max H(sum | components)
  std::size_t bound_violations = 0;        ///< H(sum) > H(joint)
  /// Cases where H(sum) == H(joint) disagrees with injectivity of the sum.
  std::size_t equality_mismatches = 0;
  bool passed() const noexcept { return failures == 0; }
};

/// Runs `trials` random joints (K <= max_K, <= max_values per component)
/// plus as many injective constructions, trial t drawing from stream t.
VerifyReport verify_entropy_identity(std::uint64_t seed, std::size_t trials, std::size_t max_K = 4,
                            std::size_t max_values = 6);

/// {"K": 2, "support": [[0, 1], [1, 0]], "probabilities": [0.5, 0.5]}
std::string joint_to_json(const DiscreteJoint& joint);
DiscreteJoint joint_from_json(std::string_view text);

} // namespace dwb::entropy
