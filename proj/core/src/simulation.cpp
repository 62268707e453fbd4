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
#include "d2oc/simulation.hpp"

#include <algorithm>
#include <random>

namespace d2oc {

namespace {

Rng stream(std::uint64_t seed, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
    return Rng(seq);
}

constexpr std::uint32_t kInitTag = 0x1d0c0000u;
constexpr std::uint32_t kSubsampleTag = 0x5ab50000u;

double evaluate_w2sq(const EmpiricalDistribution& emp, const DiscreteMeasure& nu, int cap,
                     std::uint64_t run_seed, int step, int& sample_size) {
    if (emp.point_count() <= cap) {
        sample_size = emp.point_count();
        return solve_optimal_transport(emp.measure(), nu).cost;
    }
    Rng mix = stream(run_seed, kSubsampleTag + static_cast<std::uint32_t>(step));
    const DiscreteMeasure sub = emp.subsample(cap, mix());
    sample_size = sub.size();
    return solve_optimal_transport(sub, nu).cost;
}

Matrix outputs_of(const std::vector<Agent>& agents) {
    Matrix y(agents.front().y.size(), static_cast<Eigen::Index>(agents.size()));
    for (std::size_t i = 0; i < agents.size(); ++i) y.col(static_cast<Eigen::Index>(i)) = agents[i].y;
    return y;
}

}  // namespace

std::vector<Agent> make_agents(const ScenarioConfig& config, std::uint64_t run_seed) {
    Rng init = stream(run_seed, kInitTag);
    std::vector<Agent> agents;
    agents.reserve(config.agents.size());
    for (std::size_t i = 0; i < config.agents.size(); ++i) {
        const AgentSpec& spec = config.agents[i];
        AgentModel model = build_model(spec.model ? *spec.model : config.model);
        Vector x0 = spec.initial_mean;
        if (spec.initial_covariance.size()) x0 += sample_gaussian(psd_factor(spec.initial_covariance), init);
        const Vector y0 = model.C() * x0 + sample_gaussian(model.measurement_noise_factor(), init);
        const bool kalman = config.estimator == EstimatorKind::Kalman;
        const Vector mu0 = kalman ? spec.initial_mean : x0;
        agents.emplace_back(std::move(model), config.horizon, x0, mu0, y0,
                            stream(run_seed, static_cast<std::uint32_t>(i + 1)), kalman);
    }
    return agents;
}

CoordinatorConfig make_coordinator_config(const ScenarioConfig& config, int input_dim) {
    CoordinatorConfig cc;
    cc.selection.horizon = config.horizon;
    cc.selection.constraints = config.constraints;
    cc.selection.mode = config.selection;
    cc.selection.lambda = config.lambda;
    cc.selection.knn = config.knn;
    cc.selection.mass = config.agent_mass();
    cc.R = default_input_weight(input_dim, config.horizon, config.r_scale);
    cc.comm_range = config.comm_range;
    cc.controller = config.controller;
    cc.estimator = config.estimator;
    cc.on_exhaustion = config.on_exhaustion;
    cc.greedy = config.greedy;
    cc.weight_rule = config.weight_rule;
    cc.radius_sigma = config.radius_sigma;
    return cc;
}

std::vector<int> evaluation_steps(int steps, int stride) {
    std::vector<int> out;
    for (int k = 0; k <= steps; k += stride) out.push_back(k);
    if (out.back() != steps) out.push_back(steps);
    return out;
}

RunResult run_scenario(const ScenarioConfig& config, int run_index, const RunOptions& options) {
    const std::uint64_t run_seed = options.seed.value_or(config.seed + static_cast<std::uint64_t>(run_index));
    RunResult result;
    result.record.run = run_index;
    result.record.seed = run_seed;

    int step = 0;
    try {
        std::vector<Agent> agents = make_agents(config, run_seed);
        SampleField field = SampleField::uniform(target_points(config.target), static_cast<int>(agents.size()));
        const DiscreteMeasure nu = DiscreteMeasure::uniform(field.samples);
        const CoordinatorConfig cc = make_coordinator_config(config, agents.front().model.input_dim());
        EmpiricalDistribution emp(outputs_of(agents));
        const std::vector<int> evals = evaluation_steps(config.steps, config.w2_stride);
        std::size_t next_eval = 0;

        auto record = [&](int k, const CycleEvent* event) {
            StepRecord r;
            r.run = run_index;
            r.step = k;
            r.support_size = emp.point_count();
            r.w2sq = evaluate_w2sq(emp, nu, config.w2_subsample, run_seed, k, r.w2_sample_size);
            if (event) {
                r.comm_edges = static_cast<int>(event->edges.size());
                const double na = static_cast<double>(event->agents.size());
                for (const AgentStepRecord& a : event->agents) {
                    r.proj_dist_mean += a.projection_distance / na;
                    r.obj_mean += a.objective / na;
                    r.const_term += a.constant_term / na;
                    r.expected_cost_mean += a.expected_cost / na;
                    r.input_norm_mean += a.u.norm() / na;
                    r.idle_agents += a.idle ? 1 : 0;
                }
            } else {
                r.comm_edges = comm_graph(emp.points(), config.comm_range).edge_count();
            }
            result.steps.push_back(r);
        };

        record(0, nullptr);
        ++next_eval;
        for (step = 1; step <= config.steps; ++step) {
            const CycleEvent event = run_cycle(agents, field, cc, step - 1);
            emp.update(outputs_of(agents));
            if (options.observer) options.observer(step, agents, field, emp, event);
            if (next_eval < evals.size() && evals[next_eval] == step) {
                record(step, &event);
                ++next_eval;
            }
        }
    } catch (const std::exception& e) {
        result.record.failed = true;
        result.record.failure_step = step;
        result.record.cause = e.what();
    }

    if (!result.steps.empty()) {
        result.record.initial_w2sq = result.steps.front().w2sq;
        result.record.final_w2sq = result.steps.back().w2sq;
    }
    if (result.steps.size() >= 10) {
        std::vector<std::pair<double, double>> series;
        for (const auto& s : result.steps) series.emplace_back(s.step, s.w2sq);
        result.record.fit = convergence_diagnostics(series);
    }
    return result;
}

MetricsLog run_batch(const ScenarioConfig& config, const BatchOptions& options) {
    const int runs = options.runs.value_or(config.runs);
    if (runs < 1) throw std::invalid_argument("run count must be >= 1");
    const std::uint64_t base = options.seed.value_or(config.seed);

    MetricsLog log;
    log.meta.scenario = config.name;
    log.meta.controller = to_string(config.controller);
    log.meta.runs = runs;
    log.meta.seed = base;
    log.meta.steps = config.steps;
    log.meta.stride = config.w2_stride;
    log.meta.agents = static_cast<int>(config.agents.size());
    log.meta.created = utc_timestamp();

    for (int i = 0; i < runs; ++i) {
        RunOptions ro;
        ro.seed = options.same_seed ? base : base + static_cast<std::uint64_t>(i);
        RunResult r = run_scenario(config, i, ro);
        log.steps.insert(log.steps.end(), r.steps.begin(), r.steps.end());
        if (options.on_run) options.on_run(i, r.record);
        log.runs.push_back(std::move(r.record));
    }
    log.summary = aggregate_steps(log.steps);
    if (log.summary.size() >= 10) log.batch_fit = convergence_diagnostics(log.mean_series());
    return log;
}

}  // namespace d2oc
