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
#ifndef D2OC_DIAGNOSTICS_HPP
#define D2OC_DIAGNOSTICS_HPP

#include <utility>
#include <vector>

namespace d2oc {

struct ConvergenceFit {
    double C = 0.0;        // coefficient of 1/k
    double epsilon = 0.0;  // floor
    double residual = 0.0;       // mean squared fit residual over the tail
    double tail_variance = 0.0;  // population variance of the tail values
    int points = 0;
    bool consistent = false;  // residual <= fraction * tail_variance

    bool operator==(const ConvergenceFit&) const = default;
};

/**
 * Least-squares fit of w(k) ~ epsilon + C / k over the second half of
 * `series` (pairs (k, w), k increasing, k > 0 used). A constant tail gives
 * epsilon = that constant and C = 0. Throws std::invalid_argument for fewer
 * than 10 points.
 */
ConvergenceFit convergence_diagnostics(const std::vector<std::pair<double, double>>& series,
                                       double residual_fraction = 0.25);

}  // namespace d2oc

#endif  // D2OC_DIAGNOSTICS_HPP
