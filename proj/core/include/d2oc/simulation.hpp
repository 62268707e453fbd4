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
#ifndef D2OC_SIMULATION_HPP
#define D2OC_SIMULATION_HPP

#include "d2oc/coordinator.hpp"
#include "d2oc/metrics.hpp"
#include "d2oc/scenario.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace d2oc {

/// Called after every cycle with the post-cycle agents, field and empirical distribution.
using CycleObserver = std::function<void(int step, const std::vector<Agent>&, const SampleField&,
                                         const EmpiricalDistribution&, const CycleEvent&)>;

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides config.seed + run index
    CycleObserver observer;
};

struct RunResult {
    std::vector<StepRecord> steps;
    RunRecord record;
};

/// Agents with sampled initial states, in scenario order.
std::vector<Agent> make_agents(const ScenarioConfig& config, std::uint64_t run_seed);

CoordinatorConfig make_coordinator_config(const ScenarioConfig& config, int input_dim);

/// W2 evaluation steps: 0, every stride, and the mission end.
std::vector<int> evaluation_steps(int steps, int stride);

/**
 * One mission of config.steps cycles. Failures are caught and reported in
 * the record together with the step at which they happened; the records
 * gathered before the failure are kept.
 */
RunResult run_scenario(const ScenarioConfig& config, int run_index, const RunOptions& options = {});

struct BatchOptions {
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;  // base seed override
    bool same_seed = false;             // every run uses the base seed
    std::function<void(int run, const RunRecord&)> on_run;
};

/// Runs seeds base + 0 ... base + R - 1 and aggregates the W2^2 bands.
MetricsLog run_batch(const ScenarioConfig& config, const BatchOptions& options = {});

}  // namespace d2oc

#endif  // D2OC_SIMULATION_HPP
