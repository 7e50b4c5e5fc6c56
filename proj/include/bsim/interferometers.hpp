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
#include <string>
#include <string_view>
#include <vector>

#include "bsim/permanents.hpp"

namespace bsim {

enum class InterferometerKind { haar, fourier, hadamard, circuit, lossy, user };

std::string_view to_string(InterferometerKind kind);
InterferometerKind interferometer_kind_from_string(std::string_view name);

/// An m-mode linear-optical unitary. Column index is the input mode, row index
/// the output mode: a_j^dagger -> sum_k U(k, j) b_k^dagger.
///
/// Immutable once built. The constructor rejects matrices with
/// max |U^dagger U - I| above 1e-10.
class Interferometer {
 public:
  Interferometer(ComplexMatrix unitary, InterferometerKind kind = InterferometerKind::user);

  int modes() const { return static_cast<int>(unitary_.rows()); }
  const ComplexMatrix& matrix() const { return unitary_; }
  InterferometerKind kind() const { return kind_; }
  Complex operator()(int out, int in) const { return unitary_(out, in); }

 private:
  ComplexMatrix unitary_;
  InterferometerKind kind_;
};

/// max_{jk} |(U^dagger U - I)_{jk}|
double unitarity_defect(const ComplexMatrix& u);

Interferometer rand_haar(int modes, std::uint64_t seed);
Interferometer fourier(int modes);
/// Normalized Sylvester-Walsh-Hadamard matrix; `modes` must be a power of two.
Interferometer hadamard(int modes);

struct BeamSplitter {
  double transmission;  // amplitude t in [0, 1]
  int mode_a;
  int mode_b;
};

struct PhaseShift {
  double phase;
  int mode;
};

/// One element of a linear-optical circuit.
class CircuitElement {
 public:
  static CircuitElement beam_splitter(double transmission, int mode_a, int mode_b);
  static CircuitElement phase_shift(double phase, int mode);

  bool is_beam_splitter() const { return is_beam_splitter_; }
  double parameter() const { return parameter_; }
  /// Target modes; the second entry is unused for phase shifts.
  int mode_a() const { return mode_a_; }
  int mode_b() const { return mode_b_; }

  /// 2x2 block for a beam splitter, 1x1 for a phase shift.
  ComplexMatrix block() const;

 private:
  CircuitElement(bool splitter, double parameter, int a, int b)
      : is_beam_splitter_(splitter), parameter_(parameter), mode_a_(a), mode_b_(b) {}

  bool is_beam_splitter_;
  double parameter_;
  int mode_a_;
  int mode_b_;
};

/// [[t, r], [r, -t]] with r = sqrt(1 - t^2).
ComplexMatrix beam_splitter(double transmission);

/// Product of the elements embedded in the m-mode identity. The first element
/// acts first, i.e. it is the rightmost factor.
Interferometer compose(const std::vector<CircuitElement>& elements, int modes);

/// 2m-mode dilation of uniform loss after `interf`:
/// [[sqrt(eta) U, sqrt(1-eta) I], [sqrt(1-eta) U, -sqrt(eta) I]].
/// Modes m..2m-1 are environment modes.
Interferometer to_lossy(const Interferometer& interf, double transmission);

}  // namespace bsim
