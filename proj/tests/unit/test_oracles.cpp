/*
 Copyright 2026 The d2oc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
// Sanity checks of the reference implementations on hand-solved inputs.
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace oracle;

TEST_CASE("oracle: transport enumeration") {
    const Vector half = Vector::Constant(2, 0.5);
    Matrix cost(2, 2);
    cost << 0.0, 1.0, 1.0, 0.0;
    CHECK(transport_vertex_enumeration(half, half, cost) == doctest::Approx(0.0));
    cost << 1.0, 0.0, 0.0, 1.0;
    CHECK(transport_vertex_enumeration(half, half, cost) == doctest::Approx(0.0));
    cost << 1.0, 2.0, 3.0, 4.0;
    CHECK(transport_vertex_enumeration(half, half, cost) == doctest::Approx(2.5));
    CHECK(transport_vertex_enumeration(Vector::Ones(1), half, (Matrix(1, 2) << 1.0, 3.0).finished()) ==
          doctest::Approx(2.0));
}

TEST_CASE("oracle: single source enumeration") {
    const Vector d2 = (Vector(3) << 4.0, 1.0, 9.0).finished();
    const Vector cap = Vector::Constant(3, 0.25);
    CHECK(single_source_enumeration(d2, cap, 0.5) == doctest::Approx(0.25 * 1.0 + 0.25 * 4.0));
    CHECK(single_source_enumeration(d2, cap, 0.1) == doctest::Approx(0.1));
}

TEST_CASE("oracle: lp feasibility and zonotope membership") {
    CHECK(lp_feasible((Matrix(1, 2) << 1.0, 1.0).finished(), Vector::Ones(1)));
    CHECK_FALSE(lp_feasible((Matrix(1, 2) << 1.0, 1.0).finished(), -Vector::Ones(1)));
    const Matrix G = Matrix::Identity(2, 2);
    CHECK(zonotope_contains_lp(Vector::Zero(2), G, Vector::Constant(2, 0.99)));
    CHECK(zonotope_contains_lp(Vector::Zero(2), G, Vector::Constant(2, 1.0)));
    CHECK_FALSE(zonotope_contains_lp(Vector::Zero(2), G, (Vector(2) << 1.01, 0.0).finished()));
    CHECK(zonotope_distance_grid(Vector::Zero(2), G, (Vector(2) << 3.0, 0.0).finished()) == doctest::Approx(2.0));
}

TEST_CASE("oracle: projected gradient") {
    const Matrix P = Matrix::Identity(2, 2);
    const Vector q = (Vector(2) << -3.0, 0.5).finished();
    const Vector x = projected_gradient(P, q, Vector::Constant(2, -1.0), Vector::Constant(2, 1.0), 1000);
    CHECK(x(0) == doctest::Approx(1.0));
    CHECK(x(1) == doctest::Approx(-0.5));
}

TEST_CASE("oracle: chi-squared") {
    CHECK(chi2_cdf_simpson(2, 1.0) == doctest::Approx(1.0 - std::exp(-0.5)));
    CHECK(chi2_cdf_simpson(1, 3.841458820694124) == doctest::Approx(0.95).epsilon(1e-8));
    CHECK(chi2_quantile_simpson(2, 0.95) == doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-8));
}

TEST_CASE("oracle: rollout") {
    const Matrix A = (Matrix(2, 2) << 1.0, 1.0, 0.0, 1.0).finished();
    const Matrix B = (Matrix(2, 1) << 0.0, 1.0).finished();
    const Matrix C = (Matrix(1, 2) << 1.0, 0.0).finished();
    const Vector y = rollout_outputs(A, B, C, Vector::Zero(2), Vector::Ones(2), 2, 2);
    // x1 = (0,1), x2 = (1,2), x3 = (3,2)
    CHECK(y(0) == doctest::Approx(1.0));
    CHECK(y(1) == doctest::Approx(3.0));
}
