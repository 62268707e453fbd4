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
#ifndef D2OC_BOX_QP_HPP
#define D2OC_BOX_QP_HPP

#include "d2oc/types.hpp"

#include <vector>

namespace d2oc {

struct BoxQpOptions {
    double tolerance = 1e-10;    // KKT residual target, relative to problem scale
    int max_iterations = 0;      // active-set cap; 0 selects 10 n + 20
    int fallback_iterations = 200000;
};

struct BoxQpResult {
    Vector x;
    Vector lambda_upper;  // multipliers of x <= upper
    Vector lambda_lower;  // multipliers of x >= lower
    double kkt_residual = 0.0;
    double objective = 0.0;
    std::vector<int> active;  // indices at a bound
    int iterations = 0;
    bool used_fallback = false;
};

/**
 * min_x  x^T H x + 2 f^T x   s.t.  lower <= x <= upper
 *
 * H must be symmetric positive semidefinite; bounds may be infinite as long
 * as the problem stays bounded. Primal active-set method with min-norm
 * subspace solves; falls back to accelerated projected gradient when the
 * working set cycles or the iteration cap is hit.
 *
 * Optimality:  H x + f + lambda_upper - lambda_lower = 0, multipliers >= 0
 * and complementary to their bounds. kkt_residual is the infinity norm of
 * that stationarity expression with multipliers read off the gradient.
 */
BoxQpResult solve_box_qp(const Matrix& H, const Vector& f, const Vector& lower,
                         const Vector& upper, const BoxQpOptions& options = {});

/// Stationarity residual at x with multipliers recovered from the gradient.
double box_kkt_residual(const Matrix& H, const Vector& f, const Vector& lower,
                        const Vector& upper, const Vector& x, Vector* lambda_upper = nullptr,
                        Vector* lambda_lower = nullptr);

}  // namespace d2oc

#endif  // D2OC_BOX_QP_HPP
