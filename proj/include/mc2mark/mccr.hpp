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

// Multi-channel colored reweighting.
//
// A local payload c of weight l colors the n' vocabulary subsets: subset i is
// green when c_i = 1. Channels are all weight-l colorings pi. For each channel
//
//   beta(pi) = sum_i pi_i P_i                      green mass
//   s_t      = n' / l                              target green scale
//   s_a(pi)  = min(s_t, 1 / beta(pi))              actual green scale
//   s_o(pi)  = s_t - s_a(pi)                       overflow green scale
//   Po_i     = P_i * sum_{pi : pi_i = 1} s_o(pi)   overflow mass
//
// and the scale applied to subset i under payload c is
//
//   alpha_i = c_i s_a(c) + (1 - s_a(c) beta(c)) Po_i / (sum_j Po_j * P_i).
//
// Averaged over all channels alpha_i is 1 for every i, and sum_i alpha_i P_i
// is 1 for every channel, which together make the reweighting unbiased.
//
// Degenerate cases resolve as follows:
//   l = 0 or l = n'            alpha = all ones
//   leftover <= 1e-12          overflow term is 0
//   P_i = 0                    alpha_i = c_i s_a(c), no overflow share
//   beta = 0, l > 0            s_a = s_t, all mass flows through overflow

#ifndef MC2MARK_MCCR_HPP_
#define MC2MARK_MCCR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mc2mark/keyderive.hpp"
#include "mc2mark/types.hpp"

namespace mc2mark {

inline constexpr double kLeftoverEpsilon = 1e-12;

struct GreenScales {
  double target = 0.0;
  double actual = 0.0;
  double overflow = 0.0;
};

struct OverflowState {
  double target_scale = 0.0;
  std::vector<double> overflow_masses;
};

// P_i for every subset under the given partition.
std::vector<double> subset_masses(const TokenDistribution& dist,
                                  std::span<const SubsetIndex> partition,
                                  std::size_t num_subsets);

double green_mass(std::span<const std::uint8_t> payload, std::span<const double> masses);

// Throws kDegenerateWeight for l = 0 and kRange for l > n'.
GreenScales scales(std::size_t weight, double beta, std::size_t num_subsets);

// Enumerates the C(n', l) channels in lexicographic rank order.
OverflowState overflow_masses(std::span<const double> masses, std::size_t weight);

std::vector<double> reweight_function(std::span<const std::uint8_t> payload,
                                      std::span<const double> masses);

TokenDistribution apply_scales(const TokenDistribution& dist,
                               std::span<const SubsetIndex> partition,
                               std::span<const double> alpha);

// payload is the already-masked local payload q_ind XOR h.
TokenDistribution reweight_layer(const TokenDistribution& dist,
                                 const StepKeyMaterial& material,
                                 std::span<const std::uint8_t> payload);

// Calls fn(indices) for every weight-l subset of {0..n-1} in lexicographic
// order; indices is sorted ascending.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t l, Fn&& fn) {
  std::vector<std::size_t> idx(l);
  for (std::size_t i = 0; i < l; ++i) idx[i] = i;
  for (;;) {
    fn(std::span<const std::size_t>(idx));
    std::size_t i = l;
    while (i > 0 && idx[i - 1] == n - l + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t k = i; k < l; ++k) idx[k] = idx[k - 1] + 1;
  }
}

}  // namespace mc2mark

#endif  // MC2MARK_MCCR_HPP_
