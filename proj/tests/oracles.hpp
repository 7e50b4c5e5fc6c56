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

// Reference implementations used only by the tests. Each one follows a
// different route from the library code it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bsim/model.hpp"
#include "bsim/rng.hpp"

namespace oracle {

using bsim::Complex;
using bsim::ComplexMatrix;
using bsim::ModeOccupation;

inline ComplexMatrix random_complex(int rows, int cols, bsim::Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const auto [re, im] = bsim::normal_pair(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

/// Gram matrix of `n` random complex unit vectors in dimension `dim`.
inline ComplexMatrix random_gram(int n, int dim, bsim::Rng& rng) {
  ComplexMatrix vectors = random_complex(dim, n, rng);
  for (int k = 0; k < n; ++k) vectors.col(k).normalize();
  ComplexMatrix s = vectors.adjoint() * vectors;
  s.diagonal().setOnes();
  return s;
}

inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Raw double sum over (sigma, rho) of
/// prod_k M(k, sigma(k)) conj(M(k, rho(k))) S(rho^-1 sigma(k), k).
inline Complex double_sum_gram(const ComplexMatrix& m, const ComplexMatrix& s) {
  const int n = static_cast<int>(m.rows());
  const auto perms = all_permutations(n);
  Complex total = 0.0;
  for (const auto& sigma : perms) {
    for (const auto& rho : perms) {
      std::vector<int> rho_inv(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) rho_inv[static_cast<std::size_t>(rho[static_cast<std::size_t>(k)])] = k;
      Complex term = 1.0;
      for (int k = 0; k < n; ++k) {
        const int sk = sigma[static_cast<std::size_t>(k)];
        term *= m(k, sk) * std::conj(m(k, rho[static_cast<std::size_t>(k)])) * s(rho_inv[static_cast<std::size_t>(sk)], k);
      }
      total += term;
    }
  }
  return total;
}

inline Complex naive_perm(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  Complex total = 0.0;
  for (const auto& p : all_permutations(n)) {
    Complex term = 1.0;
    for (int k = 0; k < n; ++k) term *= m(k, p[static_cast<std::size_t>(k)]);
    total += term;
  }
  return n == 0 ? Complex(1.0) : total;
}

/// First-quantization probability: photon k in input mode in_modes[k] carries
/// internal state phi_k with <phi_a|phi_b> = S(a, b). Sums |amplitude|^2 over
/// every resolution of the detected pattern into (mode, internal level) pairs.
inline double first_quantization_probability(const ComplexMatrix& u, const std::vector<int>& in_modes,
                                              const ModeOccupation& out, const ComplexMatrix& s) {
  const int n = static_cast<int>(in_modes.size());
  if (n == 0) return 1.0;
  // phi = Lambda^(1/2) V^dagger gives phi^dagger phi = S.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(s);
  const Eigen::VectorXd lambda = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix phi = lambda.asDiagonal() * solver.eigenvectors().adjoint();
  const int levels = n;

  const std::vector<int> out_modes = out.photon_modes();
  // Every assignment of internal levels to output slots; keep only one
  // representative per multiset (non-decreasing levels inside each mode).
  double total = 0.0;
  std::vector<int> level(static_cast<std::size_t>(n), 0);
  const auto perms = all_permutations(n);
  while (true) {
    bool canonical = true;
    for (int l = 1; l < n; ++l) {
      if (out_modes[static_cast<std::size_t>(l)] == out_modes[static_cast<std::size_t>(l - 1)] &&
          level[static_cast<std::size_t>(l)] < level[static_cast<std::size_t>(l - 1)]) {
        canonical = false;
      }
    }
    if (canonical) {
      Complex amplitude = 0.0;
      for (const auto& sigma : perms) {
        Complex term = 1.0;
        for (int k = 0; k < n; ++k) {
          const int slot = sigma[static_cast<std::size_t>(k)];
          term *= u(out_modes[static_cast<std::size_t>(slot)], in_modes[static_cast<std::size_t>(k)]) *
                  phi(level[static_cast<std::size_t>(slot)], k);
        }
        amplitude += term;
      }
      std::map<std::pair<int, int>, int> multiplicity;
      for (int l = 0; l < n; ++l) ++multiplicity[{out_modes[static_cast<std::size_t>(l)], level[static_cast<std::size_t>(l)]}];
      double norm = 1.0;
      for (const auto& [key, count] : multiplicity) norm *= std::tgamma(count + 1.0);
      total += std::norm(amplitude) / norm;
    }
    int pos = n - 1;
    while (pos >= 0 && ++level[static_cast<std::size_t>(pos)] == levels) level[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return total;
}

inline double tvd(const std::map<std::vector<int>, double>& a, const std::map<std::vector<int>, double>& b) {
  double sum = 0.0;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    sum += std::abs(v - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : b) {
    if (!a.contains(k)) sum += std::abs(v);
  }
  return 0.5 * sum;
}

inline std::map<std::vector<int>, double> as_map(const bsim::DistributionTable& table) {
  std::map<std::vector<int>, double> out;
  for (std::size_t i = 0; i < table.size(); ++i) out[table.outcomes[i].counts()] += table.probs[i];
  return out;
}

inline std::map<std::vector<int>, double> frequencies(const std::vector<ModeOccupation>& samples) {
  std::map<std::vector<int>, double> out;
  for (const auto& s : samples) out[s.counts()] += 1.0;
  for (auto& [k, v] : out) v /= static_cast<double>(samples.size());
  return out;
}

/// Subset-count law obtained by summing a full pattern table.
inline std::map<std::vector<int>, double> marginalize(const bsim::DistributionTable& table,
                                                      const std::vector<std::vector<int>>& subsets) {
  std::map<std::vector<int>, double> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::vector<int> k;
    for (const auto& subset : subsets) {
      int c = 0;
      for (int q : subset) c += table.outcomes[i][q];
      k.push_back(c);
    }
    out[k] += table.probs[i];
  }
  return out;
}

}  // namespace oracle
