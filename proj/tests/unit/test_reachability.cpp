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
#include "d2oc/chi_squared.hpp"
#include "d2oc/models.hpp"
#include "d2oc/reachability.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace d2oc;

namespace {

AgentModel integrator_1d() {
    const Matrix one = Matrix::Ones(1, 1);
    return AgentModel(one, one, one, Matrix::Zero(1, 1), Matrix::Zero(1, 1));
}

}  // namespace

TEST_CASE("chi-squared distribution") {
    CHECK(chi2_quantile(1, 0.95) == doctest::Approx(3.841).epsilon(1e-3 / 3.841));
    CHECK(chi2_quantile(2, 0.95) == doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-9));
    for (int k : {1, 2, 3, 5, 12}) {
        for (double p : {0.05, 0.5, 0.9, 0.95, 0.99}) {
            CHECK(chi2_quantile(k, p) == doctest::Approx(oracle::chi2_quantile_simpson(k, p)).epsilon(1e-6));
        }
        for (double x : {0.1, 1.0, 4.0, 20.0}) {
            CHECK(chi2_cdf(k, x) == doctest::Approx(oracle::chi2_cdf_simpson(k, x)).epsilon(1e-8));
        }
    }
    // Monotone in confidence and in degrees of freedom.
    for (int k = 1; k < 12; ++k) {
        double prev = 0.0;
        for (double p = 0.05; p < 0.99; p += 0.05) {
            const double q = chi2_quantile(k, p);
            CHECK(q > prev);
            CHECK(chi2_quantile(k + 1, p) > q);
            prev = q;
        }
    }
    CHECK(regularized_gamma_p(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)));
    CHECK_THROWS(chi2_quantile(0, 0.5));
    CHECK_THROWS(chi2_quantile(2, 1.0));
}

TEST_CASE("mean reachable set") {
    SUBCASE("degenerate box is a point") {
        const AgentModel m = models::double_integrator(1, 0.1, 0.0, 0.0);
        const Vector mu = (Vector(2) << 1.0, 2.0).finished();
        const MeanReachableSet s = mean_reachable_set(m, mu, 3, Vector::Zero(1), Vector::Zero(1));
        CHECK(s.generators.norm() == 0.0);
        CHECK((s.anchor() - m.A() * m.A() * m.A() * mu).norm() < 1e-14);
        CHECK(s.generator_count() == 3);
    }
    SUBCASE("scalar integrator interval") {
        const MeanReachableSet s =
            mean_reachable_set(integrator_1d(), Vector::Zero(1), 2, Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
        CHECK(s.anchor()(0) == doctest::Approx(0.0));
        CHECK(s.generators.cwiseAbs().sum() == doctest::Approx(2.0));
    }
    SUBCASE("asymmetric box puts the midpoint in the offset") {
        const MeanReachableSet s =
            mean_reachable_set(integrator_1d(), Vector::Zero(1), 1, Vector::Constant(1, 0.0), Vector::Constant(1, 2.0));
        CHECK(s.offset(0) == doctest::Approx(1.0));
        CHECK(s.generators(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("random feasible inputs land inside, far points do not") {
        const AgentModel m = models::double_integrator(1, 0.1, 0.0, 0.0);
        const Vector mu = (Vector(2) << 0.5, -1.0).finished();
        const Vector lo = Vector::Constant(1, -2.0);
        const Vector hi = Vector::Constant(1, 1.0);
        const MeanReachableSet s = mean_reachable_set(m, mu, 3, lo, hi);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-2.0, 1.0);
        for (int k = 0; k < 50; ++k) {
            std::vector<Vector> inputs;
            for (int t = 0; t < 3; ++t) inputs.push_back(Vector::Constant(1, u(rng)));
            const Vector x = propagate_mean(m, mu, inputs);
            CHECK(membership(s, x, 1e-9));
            CHECK(oracle::zonotope_contains_lp(s.anchor(), s.generators, x));
        }
        const Vector radius = s.generators.cwiseAbs().rowwise().sum();
        std::uniform_real_distribution<double> dir(-1.0, 1.0);
        for (int k = 0; k < 50; ++k) {
            Vector offset(2);
            offset << dir(rng), dir(rng);
            offset = offset.cwiseSign().cwiseProduct(radius + Vector::Constant(2, 0.1 + std::abs(dir(rng))));
            const Vector x = s.anchor() + offset;
            CHECK_FALSE(membership(s, x, 1e-9));
            CHECK_FALSE(oracle::zonotope_contains_lp(s.anchor(), s.generators, x));
        }
    }
    SUBCASE("zero-input step keeps reachable points reachable") {
        const AgentModel m = models::double_integrator(1, 0.1, 0.0, 0.0);
        const Vector lo = Vector::Constant(1, -1.0);
        const Vector hi = Vector::Constant(1, 1.0);
        const MeanReachableSet s2 = mean_reachable_set(m, Vector::Zero(2), 2, lo, hi);
        const MeanReachableSet s3 = mean_reachable_set(m, Vector::Zero(2), 3, lo, hi);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int k = 0; k < 30; ++k) {
            const Vector lambda = (Vector(2) << u(rng), u(rng)).finished();
            CHECK(membership(s3, m.A() * s2.point(lambda), 1e-9));
        }
    }
}

TEST_CASE("confidence ellipsoid") {
    const AgentModel m = models::double_integrator(1, 0.1, 0.04, 0.0);
    const ConfidenceEllipsoid e = confidence_ellipsoid(m, 2, 0.95);
    CHECK_FALSE(e.degenerate);
    CHECK(e.level == doctest::Approx(-2.0 * std::log(0.05)));
    CHECK((e.sigma_h - noise_covariance_h(m, 2)).norm() < 1e-15);
    CHECK(e.contains(Vector::Zero(2), Vector::Zero(2)));
    CHECK_FALSE(e.contains(Vector::Zero(2), Vector::Constant(2, 10.0)));

    const AgentModel quiet = models::double_integrator(1, 0.1, 0.0, 0.0);
    const ConfidenceEllipsoid z = confidence_ellipsoid(quiet, 3, 0.9);
    CHECK(z.degenerate);
    CHECK(z.contains(Vector::Ones(2), Vector::Ones(2)));
    CHECK_FALSE(z.contains(Vector::Ones(2), Vector::Constant(2, 1.001)));

    // Rank-one covariance: only displacements along its range are admitted.
    Matrix sw = Matrix::Zero(2, 2);
    sw(1, 1) = 1.0;
    const AgentModel rank1(Matrix::Identity(2, 2), Matrix::Ones(2, 1), Matrix::Ones(1, 2), sw, Matrix::Zero(1, 1));
    const ConfidenceEllipsoid r = confidence_ellipsoid(rank1, 1, 0.95);
    CHECK(r.degenerate);
    CHECK(r.contains(Vector::Zero(2), (Vector(2) << 0.0, 1.0).finished()));
    CHECK_FALSE(r.contains(Vector::Zero(2), (Vector(2) << 0.1, 0.0).finished()));
}

TEST_CASE("projection onto the reachable output set") {
    SUBCASE("interior point is returned unchanged") {
        const MeanReachableSet s = mean_reachable_set(integrator_1d(), Vector::Zero(1), 2,
                                                      Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
        const ZonotopeProjection p = project_to_reachable_output(Vector::Constant(1, 0.7), s, Matrix::Ones(1, 1));
        CHECK(p.point(0) == doctest::Approx(0.7));
        CHECK(p.distance == 0.0);
    }
    SUBCASE("interval clamp") {
        const MeanReachableSet s = mean_reachable_set(integrator_1d(), Vector::Zero(1), 2,
                                                      Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
        const ZonotopeProjection p = project_to_reachable_output(Vector::Constant(1, 5.0), s, Matrix::Ones(1, 1));
        CHECK(p.point(0) == doctest::Approx(2.0));
        CHECK(p.distance == doctest::Approx(3.0));
    }
    SUBCASE("random exterior points match the grid oracle, projection is idempotent") {
        std::mt19937_64 rng(19);
        for (int trial = 0; trial < 20; ++trial) {
            const Vector anchor = oracle::random_matrix(2, 1, rng);
            const Matrix G = 0.5 * oracle::random_matrix(2, 3, rng);
            const Vector q = anchor + 3.0 * oracle::random_matrix(2, 1, rng);
            const ZonotopeProjection p = project_onto_zonotope(anchor, G, q);
            // The grid value is an upper bound within half a grid cell of the true distance.
            const double grid = oracle::zonotope_distance_grid(anchor, G, q);
            CHECK(p.distance <= grid + 1e-9);
            CHECK(grid - p.distance <= 0.005 * G.colwise().norm().sum() + 1e-9);
            const ZonotopeProjection again = project_onto_zonotope(anchor, G, p.point);
            CHECK((again.point - p.point).norm() <= 1e-10);
            CHECK(p.lambda.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        }
    }
    SUBCASE("distance is 1-Lipschitz") {
        std::mt19937_64 rng(29);
        const Vector anchor = Vector::Zero(2);
        const Matrix G = oracle::random_matrix(2, 4, rng);
        for (int trial = 0; trial < 50; ++trial) {
            const Vector a = 4.0 * oracle::random_matrix(2, 1, rng);
            const Vector b = a + 0.5 * oracle::random_matrix(2, 1, rng);
            const double da = project_onto_zonotope(anchor, G, a).distance;
            const double db = project_onto_zonotope(anchor, G, b).distance;
            CHECK(std::abs(da - db) <= (a - b).norm() + 1e-9);
        }
    }
}

TEST_CASE("membership") {
    const AgentModel m = models::double_integrator(1, 0.1, 0.0, 0.0);
    const MeanReachableSet s =
        mean_reachable_set(m, Vector::Zero(2), 2, Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
    CHECK(membership(s, s.anchor(), 1e-12));
    const double reach = s.generators.colwise().norm().sum();
    CHECK_FALSE(membership(s, s.anchor() + Vector::Constant(2, 10.0 * reach), 1e-9));
    CHECK(membership(s, s.anchor() + s.generators.rowwise().sum(), 1e-8));
    CHECK(membership(s, s.anchor() - s.generators.col(0) + s.generators.col(1), 1e-8));
}
