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

#include "bsim/interferometers.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bsim/errors.hpp"
#include "bsim/rng.hpp"

namespace bsim {

namespace {

constexpr double kUnitarityTolerance = 1e-10;

void require_probability(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(InterferometerKind kind) {
  switch (kind) {
    case InterferometerKind::haar: return "haar";
    case InterferometerKind::fourier: return "fourier";
    case InterferometerKind::hadamard: return "hadamard";
    case InterferometerKind::circuit: return "circuit";
    case InterferometerKind::lossy: return "lossy";
    case InterferometerKind::user: return "user";
  }
  return "user";
}

InterferometerKind interferometer_kind_from_string(std::string_view name) {
  for (auto kind : {InterferometerKind::haar, InterferometerKind::fourier,
                    InterferometerKind::hadamard, InterferometerKind::circuit,
                    InterferometerKind::lossy, InterferometerKind::user}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown interferometer kind '" + std::string(name) + "'");
}

double unitarity_defect(const ComplexMatrix& u) {
  const ComplexMatrix defect = u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols());
  return defect.cwiseAbs().maxCoeff();
}

Interferometer::Interferometer(ComplexMatrix unitary, InterferometerKind kind)
    : unitary_(std::move(unitary)), kind_(kind) {
  if (unitary_.rows() == 0 || unitary_.rows() != unitary_.cols()) {
    throw InvalidArgument("interferometer matrix must be square with at least one mode");
  }
  if (!unitary_.allFinite()) throw NumericError("interferometer matrix has non-finite entries");
  if (unitarity_defect(unitary_) > kUnitarityTolerance) {
    throw InvalidArgument("interferometer matrix is not unitary");
  }
}

Interferometer rand_haar(int modes, std::uint64_t seed) {
  if (modes < 1) throw InvalidArgument("rand_haar: need at least one mode");
  Rng rng(derive_seed(seed, 0));
  ComplexMatrix ginibre(modes, modes);
  // Column-major fill keeps the draw order stable if the layout changes.
  for (int col = 0; col < modes; ++col) {
    for (int row = 0; row < modes; ++row) {
      const auto [re, im] = normal_pair(rng);
      ginibre(row, col) = Complex(re, im) / std::numbers::sqrt2;
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  // Fix the phase freedom of QR so the result is Haar distributed.
  for (int j = 0; j < modes; ++j) {
    const Complex pivot = r(j, j);
    const double modulus = std::abs(pivot);
    if (modulus > 0.0) q.col(j) *= pivot / modulus;
  }
  return Interferometer(std::move(q), InterferometerKind::haar);
}

Interferometer fourier(int modes) {
  if (modes < 1) throw InvalidArgument("fourier: need at least one mode");
  ComplexMatrix u(modes, modes);
  const double norm = 1.0 / std::sqrt(static_cast<double>(modes));
  for (int j = 0; j < modes; ++j) {
    for (int k = 0; k < modes; ++k) {
      // Reduce jk mod m first so large indices keep full phase precision.
      const auto step = static_cast<double>((static_cast<long long>(j) * k) % modes);
      u(j, k) = std::polar(norm, 2.0 * std::numbers::pi * step / modes);
    }
  }
  return Interferometer(std::move(u), InterferometerKind::fourier);
}

Interferometer hadamard(int modes) {
  if (modes < 1 || (modes & (modes - 1)) != 0) {
    throw InvalidArgument("hadamard: mode count must be a power of two");
  }
  ComplexMatrix u(modes, modes);
  const double norm = 1.0 / std::sqrt(static_cast<double>(modes));
  for (int j = 0; j < modes; ++j) {
    for (int k = 0; k < modes; ++k) {
      u(j, k) = (std::popcount(static_cast<unsigned>(j & k)) % 2 == 0) ? norm : -norm;
    }
  }
  return Interferometer(std::move(u), InterferometerKind::hadamard);
}

ComplexMatrix beam_splitter(double transmission) {
  require_probability(transmission, "beam splitter transmission");
  const double t = transmission;
  const double r = std::sqrt(1.0 - t * t);
  ComplexMatrix u(2, 2);
  u << t, r, r, -t;
  return u;
}

CircuitElement CircuitElement::beam_splitter(double transmission, int mode_a, int mode_b) {
  require_probability(transmission, "beam splitter transmission");
  if (mode_a == mode_b) throw InvalidArgument("beam splitter needs two distinct modes");
  if (mode_a < 0 || mode_b < 0) throw InvalidArgument("negative mode index");
  return CircuitElement(true, transmission, mode_a, mode_b);
}

CircuitElement CircuitElement::phase_shift(double phase, int mode) {
  if (!std::isfinite(phase)) throw InvalidArgument("phase must be finite");
  if (mode < 0) throw InvalidArgument("negative mode index");
  return CircuitElement(false, phase, mode, mode);
}

ComplexMatrix CircuitElement::block() const {
  if (is_beam_splitter_) return bsim::beam_splitter(parameter_);
  ComplexMatrix u(1, 1);
  u(0, 0) = std::polar(1.0, parameter_);
  return u;
}

Interferometer compose(const std::vector<CircuitElement>& elements, int modes) {
  if (modes < 1) throw InvalidArgument("compose: need at least one mode");
  ComplexMatrix u = ComplexMatrix::Identity(modes, modes);
  for (const CircuitElement& element : elements) {
    if (element.mode_a() >= modes || element.mode_b() >= modes) {
      throw InvalidArgument("circuit element mode index out of range");
    }
    const ComplexMatrix block = element.block();
    if (element.is_beam_splitter()) {
      const int a = element.mode_a();
      const int b = element.mode_b();
      // Left-multiply: only rows a and b change.
      const Eigen::RowVectorXcd row_a = u.row(a);
      const Eigen::RowVectorXcd row_b = u.row(b);
      u.row(a) = block(0, 0) * row_a + block(0, 1) * row_b;
      u.row(b) = block(1, 0) * row_a + block(1, 1) * row_b;
    } else {
      u.row(element.mode_a()) *= block(0, 0);
    }
  }
  return Interferometer(std::move(u), InterferometerKind::circuit);
}

Interferometer to_lossy(const Interferometer& interf, double transmission) {
  require_probability(transmission, "transmission");
  const int m = interf.modes();
  const double kept = std::sqrt(transmission);
  const double lost = std::sqrt(1.0 - transmission);
  ComplexMatrix u = ComplexMatrix::Zero(2 * m, 2 * m);
  u.topLeftCorner(m, m) = kept * interf.matrix();
  u.topRightCorner(m, m).diagonal().setConstant(lost);
  u.bottomLeftCorner(m, m) = lost * interf.matrix();
  u.bottomRightCorner(m, m).diagonal().setConstant(-kept);
  return Interferometer(std::move(u), InterferometerKind::lossy);
}

}  // namespace bsim
