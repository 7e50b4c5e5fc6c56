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

#include "bsim/permanents.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "bsim/errors.hpp"
#include "bsim/parallel.hpp"

namespace bsim {

namespace {

constexpr double kGramTolerance = 1e-12;
constexpr double kGramPsdTolerance = 1e-10;
constexpr double kImagTolerance = 1e-10;

void require_square(const ComplexMatrix& matrix, const char* what) {
  if (matrix.rows() != matrix.cols()) {
    throw InvalidArgument(std::string(what) + ": matrix is not square");
  }
  if (!matrix.allFinite()) throw NumericError(std::string(what) + ": non-finite entry");
}

std::uint64_t gray(std::uint64_t k) { return k ^ (k >> 1); }

// Nijenhuis-Wilf partial sum over Gray indices [begin, end).
Complex ryser_block(const ComplexMatrix& a, const Eigen::VectorXcd& offset, std::uint64_t begin,
                    std::uint64_t end) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXcd sums = offset;
  const std::uint64_t start = gray(begin);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    if ((start >> j) & 1U) sums += a.col(j);
  }
  double sign = (std::popcount(start) & 1) ? -1.0 : 1.0;
  Complex total = sign * sums.prod();
  for (std::uint64_t k = begin + 1; k < end; ++k) {
    const int j = std::countr_zero(k);
    if ((gray(k) >> j) & 1U) {
      sums += a.col(j);
    } else {
      sums -= a.col(j);
    }
    sign = -sign;
    Complex product = sums[0];
    for (Eigen::Index i = 1; i < n; ++i) product *= sums[i];
    total += sign * product;
  }
  return total;
}

}  // namespace

GramMatrix::GramMatrix(ComplexMatrix overlaps) : overlaps_(std::move(overlaps)) {
  const Eigen::Index n = overlaps_.rows();
  if (n != overlaps_.cols()) throw InvalidArgument("Gram matrix is not square");
  if (!overlaps_.allFinite()) throw NumericError("Gram matrix has non-finite entries");
  for (Eigen::Index a = 0; a < n; ++a) {
    if (std::abs(overlaps_(a, a) - 1.0) > kGramTolerance) {
      throw InvalidArgument("Gram matrix diagonal must be 1");
    }
    for (Eigen::Index b = 0; b < a; ++b) {
      if (std::abs(overlaps_(a, b) - std::conj(overlaps_(b, a))) > kGramTolerance) {
        throw InvalidArgument("Gram matrix is not Hermitian");
      }
    }
  }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(overlaps_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kGramPsdTolerance) {
      throw InvalidArgument("Gram matrix is not positive semidefinite");
    }
  }
}

GramMatrix GramMatrix::ones(Eigen::Index n) {
  return GramMatrix(ComplexMatrix::Ones(n, n), Unchecked{});
}

GramMatrix GramMatrix::identity(Eigen::Index n) {
  return GramMatrix(ComplexMatrix::Identity(n, n), Unchecked{});
}

GramMatrix GramMatrix::interpolation(Eigen::Index n, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("interpolation parameter must lie in [0, 1]");
  ComplexMatrix s = ComplexMatrix::Constant(n, n, x);
  s.diagonal().setOnes();
  return GramMatrix(std::move(s), Unchecked{});
}

GramMatrix GramMatrix::restricted(const std::vector<int>& photons) const {
  const auto k = static_cast<Eigen::Index>(photons.size());
  ComplexMatrix s(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) s(a, b) = overlaps_(photons[a], photons[b]);
  }
  return GramMatrix(std::move(s), Unchecked{});
}

Complex permanent_naive(const ComplexMatrix& matrix) {
  require_square(matrix, "permanent_naive");
  const Eigen::Index n = matrix.rows();
  if (n > 10) throw GuardExceeded("permanent_naive: n > 10");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Complex total = 0.0;
  do {
    Complex term = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) term *= matrix(j, perm[j]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Complex permanent_ryser(const ComplexMatrix& matrix, unsigned threads) {
  require_square(matrix, "permanent_ryser");
  const Eigen::Index n = matrix.rows();
  if (n == 0) return 1.0;
  if (n == 1) return matrix(0, 0);
  if (n > 62) throw GuardExceeded("permanent_ryser: n > 62");

  // x_i = a_{i,n-1} - (1/2) sum_j a_ij
  const Eigen::VectorXcd offset = matrix.col(n - 1) - 0.5 * matrix.rowwise().sum();
  const std::uint64_t subsets = std::uint64_t{1} << (n - 1);

  // Blocks below this size are not worth a thread.
  constexpr std::uint64_t kMinBlock = 1 << 12;
  std::uint64_t blocks = threads <= 1 ? 1 : std::min<std::uint64_t>(threads, subsets / kMinBlock);
  blocks = std::max<std::uint64_t>(blocks, 1);

  std::vector<Complex> partial(blocks);
  parallel_for(blocks, static_cast<unsigned>(blocks), [&](std::size_t b) {
    const std::uint64_t begin = subsets * b / blocks;
    const std::uint64_t end = subsets * (b + 1) / blocks;
    partial[b] = ryser_block(matrix, offset, begin, end);
  });
  Complex total = 0.0;
  for (const Complex& p : partial) total += p;
  const double sign = (n - 1) % 2 == 0 ? 2.0 : -2.0;
  return sign * total;
}

std::vector<Complex> permanent_column_minors(const ComplexMatrix& matrix) {
  const Eigen::Index r = matrix.rows();
  const Eigen::Index c = matrix.cols();
  if (c != r + 1) throw InvalidArgument("permanent_column_minors: expected r x (r+1) matrix");
  if (r == 0) return {Complex(1.0)};
  if (r > 62) throw GuardExceeded("permanent_column_minors: r > 62");

  // Glynn: perm(A) = 2^-(r-1) sum_{delta, delta_0 = +1} (prod delta) prod_j (sum_i delta_i A_ij)
  Eigen::VectorXcd sums = matrix.colwise().sum().transpose();
  std::vector<Complex> prefix(static_cast<std::size_t>(c) + 1);
  std::vector<Complex> suffix(static_cast<std::size_t>(c) + 1);
  std::vector<Complex> minors(static_cast<std::size_t>(c), Complex(0.0));

  auto accumulate = [&](double sign) {
    prefix[0] = 1.0;
    for (Eigen::Index j = 0; j < c; ++j) prefix[j + 1] = prefix[j] * sums[j];
    suffix[c] = 1.0;
    for (Eigen::Index j = c; j > 0; --j) suffix[j - 1] = suffix[j] * sums[j - 1];
    for (Eigen::Index l = 0; l < c; ++l) minors[l] += sign * prefix[l] * suffix[l + 1];
  };

  double sign = 1.0;
  accumulate(sign);
  const std::uint64_t steps = std::uint64_t{1} << (r - 1);
  for (std::uint64_t k = 1; k < steps; ++k) {
    const int bit = std::countr_zero(k);
    const Eigen::Index row = bit + 1;
    // Bit set in the Gray code means delta_row = -1.
    if ((gray(k) >> bit) & 1U) {
      sums -= 2.0 * matrix.row(row).transpose();
    } else {
      sums += 2.0 * matrix.row(row).transpose();
    }
    sign = -sign;
    accumulate(sign);
  }
  const double scale = std::ldexp(1.0, -static_cast<int>(r - 1));
  for (Complex& value : minors) value *= scale;
  return minors;
}

double gram_permanent(const ComplexMatrix& matrix, const GramMatrix& gram) {
  require_square(matrix, "gram_permanent");
  const Eigen::Index n = matrix.rows();
  if (gram.size() != n) throw InvalidArgument("gram_permanent: dimension mismatch");
  if (n == 0) return 1.0;

  std::vector<Eigen::Index> rho(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> rho_inverse(static_cast<std::size_t>(n));
  std::iota(rho.begin(), rho.end(), 0);
  ComplexMatrix inner(n, n);
  Complex total = 0.0;
  double mass = 0.0;
  do {
    Complex prefactor = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      prefactor *= std::conj(matrix(k, rho[k]));
      rho_inverse[rho[k]] = k;
    }
    if (prefactor == 0.0) continue;
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = 0; l < n; ++l) inner(k, l) = matrix(k, l) * gram(rho_inverse[l], k);
    }
    const Complex term = prefactor * permanent_ryser(inner);
    total += term;
    mass += std::abs(term);
  } while (std::next_permutation(rho.begin(), rho.end()));

  if (std::abs(total.imag()) > kImagTolerance * std::max(mass, 1e-300)) {
    throw NumericError("gram_permanent: imaginary residue above tolerance (non-Hermitian Gram?)");
  }
  return total.real();
}

std::vector<double> interference_orders(const ComplexMatrix& matrix) {
  require_square(matrix, "interference_orders");
  const Eigen::Index n = matrix.rows();
  std::vector<Complex> orders(static_cast<std::size_t>(n) + 1, Complex(0.0));
  if (n == 0) return {1.0};

  std::vector<Eigen::Index> tau(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> tau_inverse(static_cast<std::size_t>(n));
  std::iota(tau.begin(), tau.end(), 0);
  ComplexMatrix weights(n, n);
  do {
    int moved = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      tau_inverse[tau[k]] = k;
      if (tau[k] != k) ++moved;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index l = 0; l < n; ++l) {
        weights(i, l) = matrix(tau_inverse[i], l) * std::conj(matrix(i, l));
      }
    }
    orders[moved] += permanent_ryser(weights);
  } while (std::next_permutation(tau.begin(), tau.end()));

  std::vector<double> result(orders.size());
  for (std::size_t j = 0; j < orders.size(); ++j) result[j] = orders[j].real();
  return result;
}

RealMatrix abs2(const ComplexMatrix& matrix) { return matrix.cwiseAbs2(); }

}  // namespace bsim
