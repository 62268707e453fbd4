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
#include "d2oc/network_simplex.hpp"
#include "d2oc/transport.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace d2oc;

namespace {

DiscreteMeasure random_measure(int dim, int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    DiscreteMeasure m;
    m.points = oracle::random_matrix(dim, count, rng);
    m.masses.resize(count);
    for (int i = 0; i < count; ++i) m.masses(i) = u(rng);
    m.masses /= m.masses.sum();
    return m;
}

Matrix cost_matrix(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    Matrix c(a.size(), b.size());
    for (int i = 0; i < a.size(); ++i) {
        for (int j = 0; j < b.size(); ++j) c(i, j) = (a.points.col(i) - b.points.col(j)).squaredNorm();
    }
    return c;
}

Matrix row(std::initializer_list<double> v) {
    Matrix m(1, static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) m(0, i++) = x;
    return m;
}

}  // namespace

TEST_CASE("wasserstein2 examples") {
    const DiscreteMeasure a = DiscreteMeasure::uniform(row({0.0, 1.0}));
    CHECK(wasserstein2(a, a) == doctest::Approx(0.0));
    CHECK(wasserstein2(DiscreteMeasure::uniform(row({0.0})), DiscreteMeasure::uniform(row({3.0}))) ==
          doctest::Approx(3.0));
    CHECK(wasserstein2(a, DiscreteMeasure::uniform(row({0.5}))) == doctest::Approx(0.5));
}

TEST_CASE("wasserstein2 rejects bad input") {
    const DiscreteMeasure a = DiscreteMeasure::uniform(row({0.0, 1.0}));
    const DiscreteMeasure planar = DiscreteMeasure::uniform(Matrix::Zero(2, 3));
    CHECK_THROWS(wasserstein2(a, planar));
    DiscreteMeasure empty;
    empty.points = Matrix(1, 0);
    empty.masses = Vector(0);
    CHECK_THROWS(wasserstein2(a, empty));
    DiscreteMeasure bad = a;
    bad.masses << 0.7, 0.7;
    CHECK_THROWS(wasserstein2(bad, a));
}

TEST_CASE("optimal transport matches vertex enumeration") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 4;
        const int n = 1 + (trial / 4) % 4;
        const int d = 1 + trial % 3;
        const DiscreteMeasure a = random_measure(d, m, rng);
        const DiscreteMeasure b = random_measure(d, n, rng);
        const OptimalTransport ot = solve_optimal_transport(a, b);
        const double oracle_cost = oracle::transport_vertex_enumeration(a.masses, b.masses, cost_matrix(a, b));
        CHECK(ot.cost == doctest::Approx(oracle_cost).epsilon(1e-9));

        // Plan marginals.
        Vector rows = Vector::Zero(m);
        Vector cols = Vector::Zero(n);
        for (const auto& e : ot.plan.entries) {
            CHECK(e.mass > 0.0);
            rows(e.source) += e.mass;
            cols(e.target) += e.mass;
        }
        CHECK((rows - a.masses).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((cols - b.masses).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(ot.plan.total_mass() == doctest::Approx(1.0));
    }
}

TEST_CASE("wasserstein2 properties") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + trial % 3;
        const DiscreteMeasure a = random_measure(d, 1 + trial % 5, rng);
        const DiscreteMeasure b = random_measure(d, 1 + (trial + 2) % 5, rng);
        const DiscreteMeasure c = random_measure(d, 1 + (trial + 3) % 5, rng);
        const double ab = wasserstein2(a, b);
        CHECK(ab == doctest::Approx(wasserstein2(b, a)).epsilon(1e-10));
        CHECK(ab <= wasserstein2(a, c) + wasserstein2(c, b) + 1e-8);

        // Translation invariance.
        const Vector shift = oracle::random_matrix(d, 1, rng);
        DiscreteMeasure as = a;
        DiscreteMeasure bs = b;
        as.points.colwise() += shift;
        bs.points.colwise() += shift;
        CHECK(wasserstein2(as, bs) == doctest::Approx(ab).epsilon(1e-10));

        // Zero iff equal up to permutation.
        DiscreteMeasure perm = a;
        perm.points = a.points.rowwise().reverse();
        perm.masses = a.masses.reverse();
        CHECK(wasserstein2(a, perm) < 1e-7);
        if (a.size() == b.size()) CHECK(ab > 1e-6);
    }
}

TEST_CASE("transportation solver handles larger degenerate instances") {
    // Uniform masses on both sides with integer-valued costs are highly degenerate.
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> cost(0, 5);
    const int m = 30;
    const int n = 20;
    Matrix c(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) c(i, j) = cost(rng);
    }
    const TransportationResult r =
        solve_transportation(Vector::Constant(m, 1.0 / m), Vector::Constant(n, 1.0 / n), c);
    double mass = 0.0;
    for (const auto& f : r.flows) mass += f.mass;
    CHECK(mass == doctest::Approx(1.0));
    CHECK(r.cost >= 0.0);

    // Dual check through a lower bound: every row pays at least its cheapest cost.
    double lower = 0.0;
    for (int i = 0; i < m; ++i) lower += c.row(i).minCoeff() / m;
    CHECK(r.cost >= lower - 1e-12);

    CHECK_THROWS(solve_transportation(Vector::Ones(2), Vector::Ones(3), Matrix::Zero(2, 3)));
}

TEST_CASE("local_transport_plan") {
    SUBCASE("single sample with room takes everything") {
        const Matrix s = row({2.0});
        const TransportPlan p = local_transport_plan(Vector::Zero(1), s, Vector::Constant(1, 5.0), 1.0);
        REQUIRE(p.entries.size() == 1);
        CHECK(p.entries[0].target == 0);
        CHECK(p.entries[0].mass == doctest::Approx(1.0));
    }
    SUBCASE("fill order follows distance") {
        const Matrix s = row({2.0, 1.0});
        const TransportPlan p = local_transport_plan(Vector::Zero(1), s, Vector::Constant(2, 0.6), 1.0);
        REQUIRE(p.entries.size() == 2);
        CHECK(p.entries[0].target == 1);
        CHECK(p.entries[0].mass == doctest::Approx(0.6));
        CHECK(p.entries[1].target == 0);
        CHECK(p.entries[1].mass == doctest::Approx(0.4));
    }
    SUBCASE("ties broken by index") {
        const Matrix s = row({-1.0, 1.0});
        const TransportPlan p = local_transport_plan(Vector::Zero(1), s, Vector::Constant(2, 0.5), 0.3);
        REQUIRE(p.entries.size() == 1);
        CHECK(p.entries[0].target == 0);
    }
    SUBCASE("insufficient capacity raises FieldExhausted") {
        CHECK_THROWS_AS(local_transport_plan(Vector::Zero(1), row({1.0, 2.0}), Vector::Constant(2, 0.1), 1.0),
                        FieldExhausted);
    }
    SUBCASE("optimal against enumeration of fill orders") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(0.0, 0.5);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 5;
            const Matrix samples = oracle::random_matrix(2, n, rng);
            Vector cap(n);
            for (int j = 0; j < n; ++j) cap(j) = u(rng);
            const double mass = std::min(1.0 / 7.0, 0.9 * cap.sum());
            const Vector src = oracle::random_matrix(2, 1, rng);
            const TransportPlan p = local_transport_plan(src, samples, cap, mass, trial % 2 ? 2 : 0);
            Vector d2(n);
            for (int j = 0; j < n; ++j) d2(j) = (samples.col(j) - src).squaredNorm();
            CHECK(plan_cost(p, src, samples) ==
                  doctest::Approx(oracle::single_source_enumeration(d2, cap, mass)).epsilon(1e-12));
            CHECK(p.total_mass() == doctest::Approx(mass).epsilon(1e-12));
            for (const auto& e : p.entries) CHECK(e.mass <= cap(e.target) + 1e-15);
        }
    }
    SUBCASE("more capacity never raises the cost") {
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 30; ++trial) {
            const Matrix samples = oracle::random_matrix(2, 12, rng);
            const Vector cap = Vector::Constant(12, 0.05);
            const Vector src = Vector::Zero(2);
            const double before = plan_cost(local_transport_plan(src, samples, cap, 0.2), src, samples);
            Vector more = cap;
            int nearest = 0;
            (samples.colwise().squaredNorm()).minCoeff(&nearest);
            more(nearest) += 0.1;
            const double after = plan_cost(local_transport_plan(src, samples, more, 0.2), src, samples);
            CHECK(after <= before + 1e-15);
        }
    }
}

TEST_CASE("weighted barycenter and the decomposition identity") {
    TransportPlan p;
    p.entries = {{0, 0, 0.5}, {0, 1, 0.5}};
    Matrix q(2, 2);
    q << 0.0, 2.0, 0.0, 0.0;
    const Vector bc = weighted_barycenter(p, q);
    CHECK(bc(0) == doctest::Approx(1.0));
    CHECK(bc(1) == doctest::Approx(0.0));

    TransportPlan p2;
    p2.entries = {{0, 0, 0.75}, {0, 1, 0.25}};
    CHECK(weighted_barycenter(p2, row({0.0, 4.0}))(0) == doctest::Approx(1.0));

    TransportPlan empty;
    CHECK_THROWS(weighted_barycenter(empty, q));

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + trial % 3;
        const int n = 1 + trial % 6;
        const Matrix pts = oracle::random_matrix(d, n, rng);
        TransportPlan plan;
        for (int j = 0; j < n; ++j) plan.entries.push_back({0, j, u(rng) + 1e-3});
        const Vector y = oracle::random_matrix(d, 1, rng);
        const Vector center = weighted_barycenter(plan, pts);
        const double lhs = plan_cost(plan, y, pts);
        const double rhs = plan.total_mass() * (y - center).squaredNorm() + plan_spread(plan, pts, center);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("EmpiricalDistribution bookkeeping") {
    Matrix y0(2, 3);
    y0 << 0, 1, 2, 0, 0, 0;
    EmpiricalDistribution e(y0);
    CHECK(e.step() == 0);
    CHECK(e.point_count() == 3);
    CHECK(e.measure().masses.isApprox(Vector::Constant(3, 1.0 / 3.0)));
    CHECK_THROWS(e.update(Matrix::Zero(2, 2)));

    for (int k = 0; k < 10; ++k) {
        e.update(Matrix::Constant(2, 3, k + 1.0));
        CHECK(e.point_count() == (e.step() + 1) * 3);
    }
    const DiscreteMeasure m = e.measure();
    CHECK(m.masses.isApprox(Vector::Constant(33, 1.0 / 33.0)));

    SUBCASE("update is the convex combination of old and new") {
        EmpiricalDistribution f(y0);
        const Matrix fresh = Matrix::Constant(2, 3, 5.0);
        const EmpiricalDistribution g = update_empirical(f, fresh);
        // Old points keep total mass (k+1)/(k+2); new ones share 1/(k+2).
        const DiscreteMeasure gm = g.measure();
        CHECK(gm.masses.head(3).sum() == doctest::Approx(0.5));
        CHECK(gm.masses.tail(3).sum() == doctest::Approx(0.5));
        CHECK(f.step() == 0);
        CHECK(g.step() == 1);
    }
    SUBCASE("subsampling is deterministic and bounded") {
        const DiscreteMeasure s1 = e.subsample(10, 99);
        const DiscreteMeasure s2 = e.subsample(10, 99);
        CHECK(s1.size() == 10);
        CHECK(s1.points == s2.points);
        CHECK(e.subsample(1000, 1).size() == e.point_count());
    }
    SUBCASE("one update moves W2^2 within the coupling bound") {
        std::mt19937_64 rng(43);
        for (int trial = 0; trial < 30; ++trial) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            Matrix start(2, 3);
            for (int i = 0; i < start.size(); ++i) start.data()[i] = u(rng);
            EmpiricalDistribution emp(start);
            const int k = trial % 4;
            for (int s = 0; s < k; ++s) {
                Matrix next(2, 3);
                for (int i = 0; i < next.size(); ++i) next.data()[i] = u(rng);
                emp.update(next);
            }
            Matrix nu_pts(2, 3);
            for (int i = 0; i < nu_pts.size(); ++i) nu_pts.data()[i] = u(rng);
            const DiscreteMeasure nu = DiscreteMeasure::uniform(nu_pts);
            const double before = solve_optimal_transport(emp.measure(), nu).cost;
            Matrix next(2, 3);
            for (int i = 0; i < next.size(); ++i) next.data()[i] = u(rng);
            emp.update(next);
            const double after = solve_optimal_transport(emp.measure(), nu).cost;
            const double diam2 = 2.0;  // unit square
            CHECK(std::abs(after - before) <= 2.0 / (k + 2) * (diam2 + before) + 1e-12);
        }
    }
}
