/*
 * Copyright 2026 The bsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <span>

#include "bsim/model.hpp"

namespace bsim {

/// E[exp(i sum_r phases[r] N_r)] over the output law, where N_r counts photons
/// in subset r. Equals perm(S o G) with G the input-mode restriction of
/// U^dagger D U, D = diag(exp(i phases[r]) on subset r, 1 elsewhere), and S
/// the Gram matrix of the input model.
Complex characteristic_function(const Input& input, const Interferometer& interf,
                                const Partition& partition, std::span<const double> phases);

/// Law of the subset counts (k_1..k_R), k_r in 0..n, by inverse DFT of the
/// characteristic function on the (n+1)^R grid. Outcomes are count vectors of
/// length R in lexicographic order with k_1 most significant.
DistributionTable partition_counts_all(const Input& input, const Interferometer& interf,
                                       const Partition& partition, unsigned threads = 1,
                                       std::uint64_t grid_limit = 1'000'000);

/// Requires a PartitionCountsAll event; stores and returns the table.
const DistributionTable& partition_counts_all(Event& event, unsigned threads = 1);

/// Probability that all n photons exit inside `subset`.
double full_bunching_probability(const Input& input, const Interferometer& interf,
                                 const Subset& subset);

/// Subset counts of a full mode pattern.
ModeOccupation bin_counts(const ModeOccupation& pattern, const Partition& partition);

}  // namespace bsim
