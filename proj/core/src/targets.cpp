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
#include "d2oc/targets.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace d2oc::targets {

Matrix ring(int count, const Vector& center, double radius, double radial_std, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("ring needs at least one sample");
    if (center.size() != 2) throw DimensionError("ring center must be 2-D");
    if (!(radius > 0.0) || radial_std < 0.0) throw std::invalid_argument("ring radius must be positive");
    Rng rng(seed);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::normal_distribution<double> radial(0.0, 1.0);
    Matrix pts(2, count);
    for (int j = 0; j < count; ++j) {
        const double theta = 2.0 * std::numbers::pi * (j + jitter(rng)) / count;
        const double rho = radius + radial_std * radial(rng);
        pts(0, j) = center(0) + rho * std::cos(theta);
        pts(1, j) = center(1) + rho * std::sin(theta);
    }
    return pts;
}

Matrix grid(const Vector& lower, const Vector& upper, int per_axis) {
    if (lower.size() != upper.size() || lower.size() == 0) throw DimensionError("grid bounds differ in length");
    if (per_axis < 1) throw std::invalid_argument("grid needs at least one point per axis");
    const auto d = lower.size();
    long total = 1;
    for (Eigen::Index a = 0; a < d; ++a) total *= per_axis;
    Matrix pts(d, total);
    for (long idx = 0; idx < total; ++idx) {
        long rest = idx;
        for (Eigen::Index a = 0; a < d; ++a) {
            const long k = rest % per_axis;
            rest /= per_axis;
            const double t = per_axis == 1 ? 0.5 : static_cast<double>(k) / (per_axis - 1);
            pts(a, idx) = lower(a) + t * (upper(a) - lower(a));
        }
    }
    return pts;
}

Matrix torus(int count, const Vector& center, double major_radius, double minor_radius,
             std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("torus needs at least one sample");
    if (center.size() != 3) throw DimensionError("torus center must be 3-D");
    if (!(major_radius > minor_radius && minor_radius > 0.0)) {
        throw std::invalid_argument("torus radii must satisfy major > minor > 0");
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix pts(3, count);
    int j = 0;
    // Rejection on the tube angle: the area element scales with R + r cos(v).
    while (j < count) {
        const double u = 2.0 * std::numbers::pi * unit(rng);
        const double v = 2.0 * std::numbers::pi * unit(rng);
        const double accept = (major_radius + minor_radius * std::cos(v)) / (major_radius + minor_radius);
        if (unit(rng) > accept) continue;
        const double ring_radius = major_radius + minor_radius * std::cos(v);
        pts(0, j) = center(0) + ring_radius * std::cos(u);
        pts(1, j) = center(1) + ring_radius * std::sin(u);
        pts(2, j) = center(2) + minor_radius * std::sin(v);
        ++j;
    }
    return pts;
}

}  // namespace d2oc::targets
