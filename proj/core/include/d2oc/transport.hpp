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
#ifndef D2OC_TRANSPORT_HPP
#define D2OC_TRANSPORT_HPP

#include "d2oc/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace d2oc {

/// Weighted point cloud; points are stored column-wise (d x count).
struct DiscreteMeasure {
    Matrix points;
    Vector masses;

    static DiscreteMeasure uniform(Matrix points);

    int dim() const { return static_cast<int>(points.rows()); }
    int size() const { return static_cast<int>(points.cols()); }

    /// Throws std::invalid_argument unless masses are nonnegative and sum to 1.
    void validate() const;
};

struct TransportEntry {
    int source;
    int target;
    double mass;
};

struct TransportPlan {
    std::vector<TransportEntry> entries;

    double total_mass() const;
};

struct OptimalTransport {
    double cost = 0.0;  // squared W2
    TransportPlan plan;
};

/// Exact optimal coupling under squared Euclidean cost.
OptimalTransport solve_optimal_transport(const DiscreteMeasure& rho, const DiscreteMeasure& nu);

double wasserstein2(const DiscreteMeasure& rho, const DiscreteMeasure& nu);

/// Raised when the remaining sample capacity cannot absorb the requested mass.
class FieldExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Single-source partial transport of `mass` from `source` onto `samples`
 * (d x N) with per-sample capacity. Samples are taken in order of squared
 * distance (ties by index) and filled up to capacity, which is optimal for
 * one source.
 *
 * With knn > 0 only the knn nearest positive-capacity samples are
 * considered, falling back to the full set when they cannot hold `mass`.
 * Entries are in fill order and carry target = sample index.
 */
TransportPlan local_transport_plan(const Vector& source, const Matrix& samples,
                                   const Vector& capacity, double mass, int knn = 0);

/// sum_e mass_e * ||source - samples(target_e)||^2
double plan_cost(const TransportPlan& plan, const Vector& source, const Matrix& samples);

/// Mass-weighted mean of the plan's target points.
Vector weighted_barycenter(const TransportPlan& plan, const Matrix& points);

/// sum_e mass_e * ||samples(target_e) - center||^2
double plan_spread(const TransportPlan& plan, const Matrix& points, const Vector& center);

/**
 * Time-averaged swarm output measure: every output recorded so far with
 * equal mass. Starts at k = 0 with one output per agent.
 */
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(const Matrix& initial_outputs);

    /// Appends one output per agent (columns) and advances k.
    void update(const Matrix& outputs);

    int step() const { return step_; }
    int agent_count() const { return agents_; }
    int point_count() const { return count_; }
    int dim() const { return static_cast<int>(storage_.rows()); }

    Matrix points() const { return storage_.leftCols(count_); }
    DiscreteMeasure measure() const;

    /// Uniform measure on at most `cap` points drawn without replacement.
    DiscreteMeasure subsample(int cap, std::uint64_t seed) const;

private:
    Matrix storage_;
    int count_ = 0;
    int agents_ = 0;
    int step_ = 0;
};

EmpiricalDistribution update_empirical(EmpiricalDistribution dist, const Matrix& outputs);

}  // namespace d2oc

#endif  // D2OC_TRANSPORT_HPP
