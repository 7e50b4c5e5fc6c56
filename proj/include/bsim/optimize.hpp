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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsim/model.hpp"

namespace bsim {

using UnitaryFunction = std::function<double(const ComplexMatrix&)>;
using UnitaryGradient = std::function<ComplexMatrix(const ComplexMatrix&)>;

/// Real cost on U(m) with its Euclidean gradient dF/d(conj U) (Wirtinger
/// convention: for F = Re tr(V^dagger U) the gradient is V / 2).
struct UnitaryObjective {
  std::string name;
  UnitaryFunction value;
  UnitaryGradient gradient;
};

/// Central differences on the real and imaginary part of every entry,
/// combined as (dF/dRe + i dF/dIm) / 2.
ComplexMatrix finite_difference_gradient(const UnitaryFunction& f, const ComplexMatrix& u, double h);

/// F(U) = Re tr(V^dagger U); maximum m at U = V.
UnitaryObjective trace_overlap_objective(ComplexMatrix target);

/// F(U) = |U(row, col)|^2; maximum 1.
UnitaryObjective entry_modulus_objective(int row, int col);

/// Bosonic full-bunching probability of single photons in `input_modes` into
/// `subset`: perm(B^dagger B) with B = U restricted to (subset, input_modes).
UnitaryObjective full_bunching_objective(std::vector<int> input_modes, std::vector<int> subset);

struct AscentOptions {
  double step = 0.1;
  int max_iter = 1000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  /// Halvings of the step tried before an iteration gives up.
  int max_halvings = 40;
  /// Haar-random start from `seed` when unset.
  std::optional<ComplexMatrix> initial;
};

struct AscentStep {
  int iteration;
  double value;
  double grad_norm;  // max |A| of the skew-Hermitian direction
};

struct AscentResult {
  ComplexMatrix unitary;
  double value = 0.0;
  std::vector<AscentStep> trace;
  double max_unitarity_defect = 0.0;
  bool converged = false;
};

/// Geodesic steepest ascent on U(m): U <- exp(mu A) U with
/// A = G U^dagger - U G^dagger, backtracking mu by halving whenever the
/// objective would decrease. Stops when max |A| < tol or after max_iter steps.
AscentResult riemannian_ascent(const UnitaryObjective& objective, int modes,
                               const AscentOptions& options);

}  // namespace bsim
