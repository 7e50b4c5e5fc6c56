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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// Gram matrix of internal-state overlaps, S(a, b) = <phi_a|phi_b>.
///
/// Construction checks that S is Hermitian and has unit diagonal (both within
/// 1e-12) and that its smallest eigenvalue is at least -1e-10.
class GramMatrix {
 public:
  explicit GramMatrix(ComplexMatrix overlaps);

  static GramMatrix ones(Eigen::Index n);
  static GramMatrix identity(Eigen::Index n);
  /// (1 - x) I + x J.
  static GramMatrix interpolation(Eigen::Index n, double x);

  Eigen::Index size() const { return overlaps_.rows(); }
  const ComplexMatrix& matrix() const { return overlaps_; }
  Complex operator()(Eigen::Index a, Eigen::Index b) const { return overlaps_(a, b); }

  /// Principal submatrix on the listed photon indices.
  GramMatrix restricted(const std::vector<int>& photons) const;

 private:
  struct Unchecked {};
  GramMatrix(ComplexMatrix overlaps, Unchecked) : overlaps_(std::move(overlaps)) {}

  ComplexMatrix overlaps_;
};

/// Sum over all n! permutations. Refuses n > 10.
Complex permanent_naive(const ComplexMatrix& matrix);

/// Ryser's formula in the Nijenhuis-Wilf form, visiting the 2^(n-1) column
/// subsets in reflected Gray-code order so that each step adds or removes a
/// single column from the running row sums.
///
/// With `threads` > 1 the subset range is split into contiguous blocks whose
/// partial sums are added in block order. The result then differs from the
/// single-threaded value only by summation-order rounding.
Complex permanent_ryser(const ComplexMatrix& matrix, unsigned threads = 1);

/// Permanents of every column-deleted minor of an r x (r+1) matrix:
/// result[l] = perm(matrix without column l). Uses Glynn's formula with
/// prefix/suffix products, so all r+1 minors cost O(r 2^r) together.
std::vector<Complex> permanent_column_minors(const ComplexMatrix& matrix);

/// Partially distinguishable transition weight
///
///   sum_{sigma, rho} prod_k M(k, sigma(k)) conj(M(k, rho(k))) S(rho^-1 sigma(k), k)
///
/// where rows of M index input photons and columns index output slots.
/// Evaluated as an outer sum over rho with an inner Ryser permanent, for a
/// cost of n! 2^n n. The imaginary residue must stay below 1e-10 of the
/// absolute term mass; a larger residue means S was not Hermitian.
double gram_permanent(const ComplexMatrix& matrix, const GramMatrix& gram);

/// Splits the weight for the (1 - x) I + x J model by interference order:
/// result[j] sums the terms whose relative permutation moves exactly j
/// photons, so that gram_permanent(M, interpolation(n, x)) = sum_j x^j result[j].
/// result has n + 1 entries; result[1] is always zero.
std::vector<double> interference_orders(const ComplexMatrix& matrix);

/// Entrywise |M|^2.
RealMatrix abs2(const ComplexMatrix& matrix);

}  // namespace bsim
