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
#ifndef D2OC_NETWORK_SIMPLEX_HPP
#define D2OC_NETWORK_SIMPLEX_HPP

#include "d2oc/types.hpp"

#include <vector>

namespace d2oc {

struct TransportFlow {
    int source;
    int target;
    double mass;
};

struct TransportationResult {
    double cost = 0.0;
    std::vector<TransportFlow> flows;  // strictly positive entries only
    long pivots = 0;
};

/**
 * Exact balanced transportation problem
 *
 *   min sum_ij cost(i,j) pi_ij  s.t.  sum_j pi_ij = supply_i,
 *                                     sum_i pi_ij = demand_j,  pi >= 0
 *
 * solved by a primal network simplex on the bipartite graph with a
 * strongly feasible spanning tree (big-M artificial start, block-search
 * pricing). supply and demand must be positive and have equal totals up to
 * rounding.
 */
TransportationResult solve_transportation(const Vector& supply, const Vector& demand,
                                          const Matrix& cost);

}  // namespace d2oc

#endif  // D2OC_NETWORK_SIMPLEX_HPP
