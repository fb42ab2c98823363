// Copyright 2026 The mc2mark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mc2mark/mccr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mc2mark {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::kLengthMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

std::size_t weight_of(std::span<const std::uint8_t> bits) {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

}  // namespace

std::vector<double> subset_masses(const TokenDistribution& dist,
                                  std::span<const SubsetIndex> partition,
                                  std::size_t num_subsets) {
  check_lengths(dist.size(), partition.size(), "distribution vs partition");
  std::vector<double> masses(num_subsets, 0.0);
  const auto probs = dist.probs();
  for (std::size_t x = 0; x < probs.size(); ++x) masses[partition[x]] += probs[x];
  return masses;
}

double green_mass(std::span<const std::uint8_t> payload, std::span<const double> masses) {
  check_lengths(payload.size(), masses.size(), "payload vs masses");
  double beta = 0.0;
  for (std::size_t i = 0; i < payload.size(); ++i) {
    if (payload[i]) beta += masses[i];
  }
  return beta;
}

GreenScales scales(std::size_t weight, double beta, std::size_t num_subsets) {
  if (weight == 0) {
    throw Error(ErrorKind::kDegenerateWeight, "target scale undefined for weight 0");
  }
  if (weight > num_subsets) {
    throw Error(ErrorKind::kRange, "weight exceeds number of subsets");
  }
  GreenScales s;
  s.target = static_cast<double>(num_subsets) / static_cast<double>(weight);
  s.actual = beta > 0.0 ? std::min(s.target, 1.0 / beta) : s.target;
  s.overflow = s.target - s.actual;
  return s;
}

OverflowState overflow_masses(std::span<const double> masses, std::size_t weight) {
  const std::size_t n = masses.size();
  if (weight == 0) {
    throw Error(ErrorKind::kDegenerateWeight, "no channels carry overflow at weight 0");
  }
  if (weight > n) throw Error(ErrorKind::kRange, "weight exceeds number of subsets");

  OverflowState state;
  state.target_scale = static_cast<double>(n) / static_cast<double>(weight);
  // Per subset: sum of s_o over channels where that subset is green.
  std::vector<double> green_overflow(n, 0.0);
  for_each_combination(n, weight, [&](std::span<const std::size_t> green) {
    double beta = 0.0;
    for (auto i : green) beta += masses[i];
    const double s_o = scales(weight, beta, n).overflow;
    if (s_o == 0.0) return;
    for (auto i : green) green_overflow[i] += s_o;
  });
  state.overflow_masses.resize(n);
  for (std::size_t i = 0; i < n; ++i) state.overflow_masses[i] = masses[i] * green_overflow[i];
  return state;
}

std::vector<double> reweight_function(std::span<const std::uint8_t> payload,
                                      std::span<const double> masses) {
  check_lengths(payload.size(), masses.size(), "payload vs masses");
  const std::size_t n = payload.size();
  const std::size_t weight = weight_of(payload);
  std::vector<double> alpha(n, 1.0);
  if (weight == 0 || weight == n) return alpha;

  const double beta = green_mass(payload, masses);
  const GreenScales s = scales(weight, beta, n);
  for (std::size_t i = 0; i < n; ++i) alpha[i] = payload[i] ? s.actual : 0.0;

  const double leftover = 1.0 - s.actual * beta;
  if (leftover <= kLeftoverEpsilon) return alpha;

  const OverflowState overflow = overflow_masses(masses, weight);
  const double total = std::accumulate(overflow.overflow_masses.begin(),
                                       overflow.overflow_masses.end(), 0.0);
  if (total <= 0.0) return alpha;
  for (std::size_t i = 0; i < n; ++i) {
    if (masses[i] > 0.0) {
      alpha[i] += leftover * overflow.overflow_masses[i] / (total * masses[i]);
    }
  }
  return alpha;
}

TokenDistribution apply_scales(const TokenDistribution& dist,
                               std::span<const SubsetIndex> partition,
                               std::span<const double> alpha) {
  check_lengths(dist.size(), partition.size(), "distribution vs partition");
  const auto probs = dist.probs();
  std::vector<double> out(probs.size());
  double total = 0.0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    out[x] = alpha[partition[x]] * probs[x];
    total += out[x];
  }
  // Exact identity for all-ones alpha; otherwise absorb float drift.
  if (total > 0.0 && std::abs(total - 1.0) > 1e-12) {
    for (auto& p : out) p /= total;
  }
  return TokenDistribution::from_normalized(std::move(out));
}

TokenDistribution reweight_layer(const TokenDistribution& dist,
                                 const StepKeyMaterial& material,
                                 std::span<const std::uint8_t> payload) {
  const std::size_t weight = weight_of(payload);
  if (weight == 0 || weight == payload.size()) return dist;
  const auto masses = subset_masses(dist, material.partition, payload.size());
  const auto alpha = reweight_function(payload, masses);
  return apply_scales(dist, material.partition, alpha);
}

}  // namespace mc2mark
