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
#include "d2oc/reachability.hpp"

#include "d2oc/box_qp.hpp"
#include "d2oc/chi_squared.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace d2oc {

MeanReachableSet mean_reachable_set(const AgentModel& model, const Vector& mu, int h,
                                    const Vector& u_min, const Vector& u_max) {
    if (h < 1) throw std::invalid_argument("reachable-set horizon must be >= 1");
    const int n = model.state_dim();
    const int m = model.input_dim();
    if (mu.size() != n) throw DimensionError("mean state has wrong dimension");
    if (u_min.size() != m || u_max.size() != m) throw DimensionError("input bounds have wrong dimension");
    if ((u_min.array() > u_max.array()).any()) throw std::invalid_argument("input box has u_min > u_max");

    const Vector mid = 0.5 * (u_min + u_max);
    const Vector half = 0.5 * (u_max - u_min);

    MeanReachableSet set;
    set.h = h;
    set.generators.resize(n, static_cast<Eigen::Index>(m) * h);
    set.offset = Vector::Zero(n);
    // Walk t = h-1 down to 0 so the power A^{h-1-t} grows by one factor per step.
    Matrix AB = model.B();
    for (int t = h - 1; t >= 0; --t) {
        set.offset += AB * mid;
        set.generators.middleCols(static_cast<Eigen::Index>(t) * m, m) = AB * half.asDiagonal();
        AB = model.A() * AB;
    }
    set.center = mu;
    for (int i = 0; i < h; ++i) set.center = model.A() * set.center;
    return set;
}

bool ConfidenceEllipsoid::contains(const Vector& mean, const Vector& x, double tol) const {
    const Vector d = x - mean;
    const Vector c = range_basis.transpose() * d;
    if ((d - range_basis * c).norm() > tol * (1.0 + d.norm())) return false;
    double q = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) q += c(i) * c(i) / range_variances(i);
    return q <= level + tol;
}

ConfidenceEllipsoid confidence_ellipsoid(const AgentModel& model, int h, double alpha) {
    ConfidenceEllipsoid e;
    e.sigma_h = noise_covariance_h(model, h);
    e.alpha = alpha;
    e.level = chi2_quantile(model.state_dim(), alpha);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(e.sigma_h);
    const Vector& values = eig.eigenvalues();
    const double cutoff = 1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) > cutoff) keep.push_back(i);
    }
    e.degenerate = static_cast<int>(keep.size()) < model.state_dim();
    e.range_basis.resize(values.size(), static_cast<Eigen::Index>(keep.size()));
    e.range_variances.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        e.range_basis.col(k) = eig.eigenvectors().col(keep[k]);
        e.range_variances(k) = values(keep[k]);
    }
    return e;
}

ZonotopeProjection project_onto_zonotope(const Vector& anchor, const Matrix& generators,
                                         const Vector& target) {
    if (anchor.size() != target.size() || generators.rows() != anchor.size()) {
        throw DimensionError("zonotope and target dimensions differ");
    }
    ZonotopeProjection out;
    const auto g = generators.cols();
    if (g == 0) {
        out.point = anchor;
        out.lambda = Vector();
    } else {
        const Matrix H = generators.transpose() * generators;
        const Vector f = generators.transpose() * (anchor - target);
        BoxQpOptions options;
        options.max_iterations = static_cast<int>(10 * g);
        const BoxQpResult qp = solve_box_qp(H, f, Vector::Constant(g, -1.0), Vector::Constant(g, 1.0), options);
        out.lambda = qp.x;
        out.kkt_residual = qp.kkt_residual;
        out.point = anchor + generators * qp.x;
    }
    out.distance = (out.point - target).norm();
    const double scale = std::max({1.0, target.norm(), anchor.norm() + generators.colwise().norm().sum()});
    if (out.distance <= 1e-12 * scale) {
        out.point = target;
        out.distance = 0.0;
    }
    return out;
}

ZonotopeProjection project_to_reachable_output(const Vector& q_bar, const MeanReachableSet& set,
                                               const Matrix& C) {
    if (C.cols() != set.center.size()) throw DimensionError("output map does not match the state dimension");
    return project_onto_zonotope(C * set.anchor(), C * set.generators, q_bar);
}

bool membership(const MeanReachableSet& set, const Vector& point, double tol) {
    return project_onto_zonotope(set.anchor(), set.generators, point).distance <= tol;
}

}  // namespace d2oc
