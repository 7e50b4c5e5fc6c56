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

#include <doctest.h>

#include <cmath>

#include "bsim/errors.hpp"
#include "bsim/interferometers.hpp"
#include "bsim/optimize.hpp"

using bsim::ComplexMatrix;

namespace {

double max_gap(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("trace overlap reaches its global maximum") {
  const int m = 6;
  const ComplexMatrix v = bsim::rand_haar(m, 701).matrix();
  const auto objective = bsim::trace_overlap_objective(v);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    bsim::AscentOptions options;
    options.seed = 710 + seed;
    const auto result = bsim::riemannian_ascent(objective, m, options);
    CHECK(result.value >= m - 1e-6);
    CHECK(max_gap(result.unitary, v) <= 1e-6);
    CHECK(result.max_unitarity_defect <= 1e-10);
    for (std::size_t i = 1; i < result.trace.size(); ++i) CHECK(result.trace[i].value >= result.trace[i - 1].value);
  }
}

TEST_CASE("entry modulus reaches one") {
  bsim::AscentOptions options;
  options.seed = 720;
  const auto result = bsim::riemannian_ascent(bsim::entry_modulus_objective(0, 0), 4, options);
  CHECK(result.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(result.max_unitarity_defect <= 1e-10);
}

TEST_CASE("constant objective stops after one iteration") {
  const bsim::UnitaryObjective flat{"flat", [](const ComplexMatrix&) { return 2.0; },
                                    [](const ComplexMatrix& u) -> ComplexMatrix { return ComplexMatrix::Zero(u.rows(), u.cols()); }};
  bsim::AscentOptions options;
  options.seed = 730;
  const ComplexMatrix start = bsim::rand_haar(3, 730).matrix();
  const auto result = bsim::riemannian_ascent(flat, 3, options);
  CHECK(result.trace.size() == 1);
  CHECK(result.converged);
  CHECK(result.unitary == start);
}

TEST_CASE("analytic gradients match finite differences") {
  const int m = 5;
  const ComplexMatrix u = bsim::rand_haar(m, 740).matrix();
  const std::vector<bsim::UnitaryObjective> objectives = {
      bsim::trace_overlap_objective(bsim::rand_haar(m, 741).matrix()),
      bsim::entry_modulus_objective(2, 3),
      bsim::full_bunching_objective({0, 1, 2}, {1, 3}),
      bsim::full_bunching_objective({4}, {0, 2}),
  };
  for (const auto& objective : objectives) {
    CAPTURE(objective.name);
    const ComplexMatrix fd = bsim::finite_difference_gradient(objective.value, u, 1e-5);
    CHECK(max_gap(objective.gradient(u), fd) <= 1e-5);
  }
}

TEST_CASE("finite differences are second order") {
  const int m = 3;
  const ComplexMatrix u = bsim::rand_haar(m, 750).matrix();
  // Cubic objective so the truncation error is visible above rounding.
  const bsim::UnitaryFunction f = [](const ComplexMatrix& x) { return std::pow(std::abs(x(0, 1)), 3); };
  auto exact = [&](const ComplexMatrix& x) {
    ComplexMatrix g = ComplexMatrix::Zero(m, m);
    g(0, 1) = 1.5 * std::abs(x(0, 1)) * x(0, 1);
    return g;
  };
  const double e1 = max_gap(bsim::finite_difference_gradient(f, u, 1e-2), exact(u));
  const double e2 = max_gap(bsim::finite_difference_gradient(f, u, 5e-3), exact(u));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));

  const bsim::UnitaryFunction constant = [](const ComplexMatrix&) { return 1.0; };
  const double h = 1e-3;
  CHECK(bsim::finite_difference_gradient(constant, u, h).cwiseAbs().maxCoeff() <= 10 * h * h);
  CHECK_THROWS_AS(bsim::finite_difference_gradient(constant, u, 0.0), bsim::InvalidArgument);
}

TEST_CASE("scaling the objective keeps the stationary point") {
  const int m = 4;
  const ComplexMatrix v = bsim::rand_haar(m, 760).matrix();
  auto base = bsim::trace_overlap_objective(v);
  bsim::UnitaryObjective scaled{"scaled", [base](const ComplexMatrix& u) { return 3.0 * base.value(u); },
                                [base](const ComplexMatrix& u) -> ComplexMatrix { return 3.0 * base.gradient(u); }};
  bsim::AscentOptions options;
  options.seed = 761;
  options.step = 0.03;
  const auto a = bsim::riemannian_ascent(base, m, options);
  const auto b = bsim::riemannian_ascent(scaled, m, options);
  CHECK(max_gap(a.unitary, v) <= 1e-6);
  CHECK(max_gap(b.unitary, v) <= 1e-6);
}

TEST_CASE("full bunching objective can be raised") {
  bsim::AscentOptions options;
  options.seed = 770;
  options.max_iter = 300;
  const auto objective = bsim::full_bunching_objective({0, 1}, {0, 1});
  const auto start = objective.value(bsim::rand_haar(4, 770).matrix());
  const auto result = bsim::riemannian_ascent(objective, 4, options);
  CHECK(result.value >= start);
  CHECK(result.value <= 2.0 + 1e-9);  // perm(B^dagger B) <= 2! for two photons
  CHECK(result.max_unitarity_defect <= 1e-10);
}

TEST_CASE("ascent argument checks") {
  auto objective = bsim::entry_modulus_objective(0, 0);
  bsim::AscentOptions options;
  options.step = 0.0;
  CHECK_THROWS_AS(bsim::riemannian_ascent(objective, 3, options), bsim::InvalidArgument);
  options.step = 0.1;
  options.tol = -1.0;
  CHECK_THROWS_AS(bsim::riemannian_ascent(objective, 3, options), bsim::InvalidArgument);
  const bsim::UnitaryObjective bad{"bad", [](const ComplexMatrix&) { return std::nan(""); },
                                   [](const ComplexMatrix& u) -> ComplexMatrix { return u; }};
  CHECK_THROWS_AS(bsim::riemannian_ascent(bad, 3, bsim::AscentOptions{}), bsim::NumericError);
}
