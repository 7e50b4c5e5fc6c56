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

#include "bsim/optimize.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "bsim/errors.hpp"

namespace bsim {

namespace {

double evaluate(const UnitaryObjective& objective, const ComplexMatrix& u) {
  const double value = objective.value(u);
  if (!std::isfinite(value)) throw NumericError("objective '" + objective.name + "' is not finite");
  return value;
}

ComplexMatrix submatrix(const ComplexMatrix& u, const std::vector<int>& rows, const std::vector<int>& cols) {
  ComplexMatrix b(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = u(rows[r], cols[c]);
  }
  return b;
}

ComplexMatrix without(const ComplexMatrix& h, Eigen::Index row, Eigen::Index col) {
  const Eigen::Index n = h.rows();
  ComplexMatrix minor(n - 1, n - 1);
  for (Eigen::Index i = 0, mi = 0; i < n; ++i) {
    if (i == row) continue;
    for (Eigen::Index j = 0, mj = 0; j < n; ++j) {
      if (j == col) continue;
      minor(mi, mj++) = h(i, j);
    }
    ++mi;
  }
  return minor;
}

}  // namespace

ComplexMatrix finite_difference_gradient(const UnitaryFunction& f, const ComplexMatrix& u, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  ComplexMatrix gradient(u.rows(), u.cols());
  ComplexMatrix probe = u;
  auto eval = [&](const ComplexMatrix& x) {
    const double value = f(x);
    if (!std::isfinite(value)) throw NumericError("objective is not finite");
    return value;
  };
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const Complex original = u(i, j);
      probe(i, j) = original + h;
      const double re_plus = eval(probe);
      probe(i, j) = original - h;
      const double re_minus = eval(probe);
      probe(i, j) = original + Complex(0.0, h);
      const double im_plus = eval(probe);
      probe(i, j) = original - Complex(0.0, h);
      const double im_minus = eval(probe);
      probe(i, j) = original;
      gradient(i, j) = 0.5 * Complex((re_plus - re_minus) / (2.0 * h), (im_plus - im_minus) / (2.0 * h));
    }
  }
  return gradient;
}

UnitaryObjective trace_overlap_objective(ComplexMatrix target) {
  UnitaryObjective objective;
  objective.name = "trace-overlap";
  objective.value = [target](const ComplexMatrix& u) { return (target.adjoint() * u).trace().real(); };
  objective.gradient = [target](const ComplexMatrix&) -> ComplexMatrix { return 0.5 * target; };
  return objective;
}

UnitaryObjective entry_modulus_objective(int row, int col) {
  if (row < 0 || col < 0) throw InvalidArgument("entry index must be nonnegative");
  UnitaryObjective objective;
  objective.name = "entry-modulus";
  objective.value = [row, col](const ComplexMatrix& u) { return std::norm(u(row, col)); };
  objective.gradient = [row, col](const ComplexMatrix& u) {
    ComplexMatrix g = ComplexMatrix::Zero(u.rows(), u.cols());
    g(row, col) = u(row, col);
    return g;
  };
  return objective;
}

UnitaryObjective full_bunching_objective(std::vector<int> input_modes, std::vector<int> subset) {
  if (input_modes.empty() || subset.empty()) throw InvalidArgument("full bunching needs photons and a subset");
  UnitaryObjective objective;
  objective.name = "full-bunching";
  objective.value = [input_modes, subset](const ComplexMatrix& u) {
    const ComplexMatrix b = submatrix(u, subset, input_modes);
    return permanent_ryser(b.adjoint() * b).real();
  };
  // dF/d conj(B(k, a)) = sum_b C(a, b) B(k, b), C(a, b) = perm of H without row a, column b.
  objective.gradient = [input_modes, subset](const ComplexMatrix& u) {
    const ComplexMatrix b = submatrix(u, subset, input_modes);
    const ComplexMatrix h = b.adjoint() * b;
    const Eigen::Index n = h.rows();
    ComplexMatrix cofactors(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index c = 0; c < n; ++c) cofactors(a, c) = n == 1 ? Complex(1.0) : permanent_ryser(without(h, a, c));
    }
    const ComplexMatrix block = b * cofactors.transpose();
    ComplexMatrix g = ComplexMatrix::Zero(u.rows(), u.cols());
    for (std::size_t k = 0; k < subset.size(); ++k) {
      for (std::size_t a = 0; a < input_modes.size(); ++a) {
        g(subset[k], input_modes[a]) = block(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a));
      }
    }
    return g;
  };
  return objective;
}

AscentResult riemannian_ascent(const UnitaryObjective& objective, int modes, const AscentOptions& options) {
  if (!(options.step > 0.0)) throw InvalidArgument("step size must be positive");
  if (!(options.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (options.max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (modes < 1) throw InvalidArgument("need at least one mode");

  AscentResult result;
  result.unitary = options.initial ? *options.initial : rand_haar(modes, options.seed).matrix();
  if (result.unitary.rows() != modes || result.unitary.cols() != modes) {
    throw InvalidArgument("initial unitary has the wrong size");
  }
  result.value = evaluate(objective, result.unitary);
  result.max_unitarity_defect = unitarity_defect(result.unitary);

  for (int iteration = 1; iteration <= options.max_iter; ++iteration) {
    const ComplexMatrix g = objective.gradient(result.unitary);
    if (!g.allFinite()) throw NumericError("gradient of '" + objective.name + "' is not finite");
    if (g.rows() != modes || g.cols() != modes) throw InvalidArgument("gradient has the wrong size");
    const ComplexMatrix direction = g * result.unitary.adjoint() - result.unitary * g.adjoint();
    const double grad_norm = direction.cwiseAbs().maxCoeff();
    result.trace.push_back({iteration, result.value, grad_norm});
    if (grad_norm < options.tol) {
      result.converged = true;
      break;
    }

    double mu = options.step;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, mu *= 0.5) {
      const ComplexMatrix rotation = (mu * direction).exp();
      ComplexMatrix candidate = rotation * result.unitary;
      const double value = evaluate(objective, candidate);
      if (value >= result.value) {
        result.unitary = std::move(candidate);
        result.value = value;
        accepted = true;
        break;
      }
    }
    result.max_unitarity_defect = std::max(result.max_unitarity_defect, unitarity_defect(result.unitary));
    if (!accepted) break;  // no ascent step left at working precision
  }
  return result;
}

}  // namespace bsim
