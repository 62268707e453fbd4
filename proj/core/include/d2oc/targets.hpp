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
#ifndef D2OC_TARGETS_HPP
#define D2OC_TARGETS_HPP

#include "d2oc/types.hpp"

#include <cstdint>

namespace d2oc::targets {

/// Planar ring: evenly spaced angles with seeded angular jitter and radial spread.
Matrix ring(int count, const Vector& center, double radius, double radial_std, std::uint64_t seed);

/// Regular grid over the axis-aligned box [lower, upper], `per_axis` points per axis.
Matrix grid(const Vector& lower, const Vector& upper, int per_axis);

/**
 * Points on a torus surface around `center` with the given major and minor
 * radii, axis along z. Angles are drawn so the samples are uniform in area.
 */
Matrix torus(int count, const Vector& center, double major_radius, double minor_radius,
             std::uint64_t seed);

}  // namespace d2oc::targets

#endif  // D2OC_TARGETS_HPP
