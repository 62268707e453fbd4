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
#include "d2oc/transport.hpp"

#include "d2oc/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace d2oc {

DiscreteMeasure DiscreteMeasure::uniform(Matrix points) {
    if (points.cols() == 0) throw std::invalid_argument("measure needs at least one point");
    DiscreteMeasure m;
    const auto count = points.cols();
    m.points = std::move(points);
    m.masses = Vector::Constant(count, 1.0 / static_cast<double>(count));
    return m;
}

void DiscreteMeasure::validate() const {
    if (points.cols() == 0) throw std::invalid_argument("measure is empty");
    if (masses.size() != points.cols()) throw DimensionError("measure has mismatched point and mass counts");
    if (!points.allFinite() || !masses.allFinite()) throw std::invalid_argument("measure has non-finite entries");
    if ((masses.array() < 0.0).any()) throw std::invalid_argument("measure has negative mass");
    if (std::abs(masses.sum() - 1.0) > 1e-9) throw std::invalid_argument("measure masses do not sum to 1");
}

double TransportPlan::total_mass() const {
    double total = 0.0;
    for (const auto& e : entries) total += e.mass;
    return total;
}

namespace {

std::vector<int> positive_support(const Vector& masses) {
    std::vector<int> idx;
    for (Eigen::Index i = 0; i < masses.size(); ++i) {
        if (masses(i) > 0.0) idx.push_back(static_cast<int>(i));
    }
    return idx;
}

}  // namespace

OptimalTransport solve_optimal_transport(const DiscreteMeasure& rho, const DiscreteMeasure& nu) {
    rho.validate();
    nu.validate();
    if (rho.dim() != nu.dim()) throw DimensionError("measures live in different dimensions");

    const std::vector<int> rs = positive_support(rho.masses);
    const std::vector<int> ns = positive_support(nu.masses);
    Vector supply(rs.size());
    Vector demand(ns.size());
    for (std::size_t i = 0; i < rs.size(); ++i) supply(i) = rho.masses(rs[i]);
    for (std::size_t j = 0; j < ns.size(); ++j) demand(j) = nu.masses(ns[j]);
    // Both totals are 1 within 1e-9; rescale the smaller side so the network is balanced.
    demand *= supply.sum() / demand.sum();

    Matrix cost(rs.size(), ns.size());
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const auto q = nu.points.col(ns[j]);
        for (std::size_t i = 0; i < rs.size(); ++i) {
            cost(i, j) = (rho.points.col(rs[i]) - q).squaredNorm();
        }
    }

    const TransportationResult solved = solve_transportation(supply, demand, cost);
    OptimalTransport out;
    out.cost = std::max(0.0, solved.cost);
    out.plan.entries.reserve(solved.flows.size());
    for (const auto& f : solved.flows) out.plan.entries.push_back({rs[f.source], ns[f.target], f.mass});
    return out;
}

double wasserstein2(const DiscreteMeasure& rho, const DiscreteMeasure& nu) {
    return std::sqrt(solve_optimal_transport(rho, nu).cost);
}

TransportPlan local_transport_plan(const Vector& source, const Matrix& samples,
                                   const Vector& capacity, double mass, int knn) {
    if (samples.cols() == 0) throw std::invalid_argument("sample field is empty");
    if (samples.rows() != source.size()) throw DimensionError("source and samples differ in dimension");
    if (capacity.size() != samples.cols()) throw DimensionError("capacity length differs from sample count");
    if (!(mass >= 0.0)) throw std::invalid_argument("transported mass must be nonnegative");

    TransportPlan plan;
    if (mass == 0.0) return plan;

    std::vector<std::pair<double, int>> order;
    order.reserve(samples.cols());
    double available = 0.0;
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
        if (capacity(j) > 0.0) {
            order.emplace_back((samples.col(j) - source).squaredNorm(), static_cast<int>(j));
            available += capacity(j);
        }
    }
    const double needed = mass * (1.0 - 1e-9);
    if (available < needed) throw FieldExhausted("remaining sample capacity is below the per-step mass");

    auto fill = [&](std::size_t count) {
        plan.entries.clear();
        double remaining = mass;
        for (std::size_t k = 0; k < count && remaining > 0.0; ++k) {
            const int j = order[k].second;
            const double take = std::min(capacity(j), remaining);
            plan.entries.push_back({0, j, take});
            remaining -= take;
        }
        return remaining <= mass - needed;
    };

    if (knn > 0 && static_cast<std::size_t>(knn) < order.size()) {
        std::partial_sort(order.begin(), order.begin() + knn, order.end());
        if (fill(static_cast<std::size_t>(knn))) return plan;
    }
    std::sort(order.begin(), order.end());
    fill(order.size());
    return plan;
}

double plan_cost(const TransportPlan& plan, const Vector& source, const Matrix& samples) {
    double cost = 0.0;
    for (const auto& e : plan.entries) cost += e.mass * (samples.col(e.target) - source).squaredNorm();
    return cost;
}

Vector weighted_barycenter(const TransportPlan& plan, const Matrix& points) {
    const double total = plan.total_mass();
    if (!(total > 0.0)) throw std::invalid_argument("barycenter of a plan with zero mass");
    Vector acc = Vector::Zero(points.rows());
    for (const auto& e : plan.entries) acc += e.mass * points.col(e.target);
    return acc / total;
}

double plan_spread(const TransportPlan& plan, const Matrix& points, const Vector& center) {
    double s = 0.0;
    for (const auto& e : plan.entries) s += e.mass * (points.col(e.target) - center).squaredNorm();
    return s;
}

EmpiricalDistribution::EmpiricalDistribution(const Matrix& initial_outputs)
    : storage_(initial_outputs.rows(), std::max<Eigen::Index>(16, 4 * initial_outputs.cols())),
      count_(static_cast<int>(initial_outputs.cols())),
      agents_(static_cast<int>(initial_outputs.cols())) {
    if (initial_outputs.cols() == 0 || initial_outputs.rows() == 0) {
        throw std::invalid_argument("empirical distribution needs at least one agent output");
    }
    storage_.leftCols(count_) = initial_outputs;
}

void EmpiricalDistribution::update(const Matrix& outputs) {
    if (outputs.cols() != agents_) throw DimensionError("expected one output per agent");
    if (outputs.rows() != storage_.rows()) throw DimensionError("output dimension changed");
    if (count_ + agents_ > storage_.cols()) {
        storage_.conservativeResize(Eigen::NoChange, 2 * storage_.cols() + agents_);
    }
    storage_.middleCols(count_, agents_) = outputs;
    count_ += agents_;
    ++step_;
}

DiscreteMeasure EmpiricalDistribution::measure() const {
    return DiscreteMeasure::uniform(points());
}

DiscreteMeasure EmpiricalDistribution::subsample(int cap, std::uint64_t seed) const {
    if (cap < 1) throw std::invalid_argument("subsample cap must be >= 1");
    if (count_ <= cap) return measure();
    std::vector<int> idx(count_);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    // Partial Fisher-Yates: the first `cap` slots become a uniform subset.
    for (int i = 0; i < cap; ++i) {
        std::uniform_int_distribution<int> pick(i, count_ - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    Matrix pts(dim(), cap);
    for (int i = 0; i < cap; ++i) pts.col(i) = storage_.col(idx[i]);
    return DiscreteMeasure::uniform(std::move(pts));
}

EmpiricalDistribution update_empirical(EmpiricalDistribution dist, const Matrix& outputs) {
    dist.update(outputs);
    return dist;
}

}  // namespace d2oc
