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
#ifndef D2OC_REACHABILITY_HPP
#define D2OC_REACHABILITY_HPP

#include "d2oc/lti_model.hpp"

namespace d2oc {

/**
 * h-step mean reachable set under per-step box inputs, as a zonotope
 *
 *   { center + offset + generators * lambda : lambda in [-1, 1]^{m h} }
 *
 * center = A^h mu, offset collects the input-box midpoints, and generator
 * column (t, j) is A^{h-1-t} B e_j scaled by the half-range of input j.
 */
struct MeanReachableSet {
    Vector center;
    Vector offset;
    Matrix generators;  // n x (m h)
    int h = 0;

    Vector anchor() const { return center + offset; }
    Vector point(const Vector& lambda) const { return anchor() + generators * lambda; }
    int generator_count() const { return static_cast<int>(generators.cols()); }
};

MeanReachableSet mean_reachable_set(const AgentModel& model, const Vector& mu, int h,
                                    const Vector& u_min, const Vector& u_max);

/**
 * Confidence region {x : (x - m)^T Sigma_h^{-1} (x - m) <= level} of the
 * h-step state around its mean. When Sigma_h is singular the region lives
 * in the covariance range: range_basis spans it and range_variances are the
 * retained eigenvalues.
 */
struct ConfidenceEllipsoid {
    Matrix sigma_h;
    double level = 0.0;
    double alpha = 0.0;
    bool degenerate = false;
    Matrix range_basis;
    Vector range_variances;

    /// Mahalanobis test; off-range displacements are never contained.
    bool contains(const Vector& mean, const Vector& x, double tol = 1e-9) const;
};

ConfidenceEllipsoid confidence_ellipsoid(const AgentModel& model, int h, double alpha);

struct ZonotopeProjection {
    Vector point;
    double distance = 0.0;
    Vector lambda;
    double kkt_residual = 0.0;
};

/// Closest point of {anchor + G lambda : |lambda|_inf <= 1} to target.
ZonotopeProjection project_onto_zonotope(const Vector& anchor, const Matrix& generators,
                                         const Vector& target);

/// Closest point of the output zonotope C * set to q_bar.
ZonotopeProjection project_to_reachable_output(const Vector& q_bar, const MeanReachableSet& set,
                                               const Matrix& C);

bool membership(const MeanReachableSet& set, const Vector& point, double tol);

}  // namespace d2oc

#endif  // D2OC_REACHABILITY_HPP
