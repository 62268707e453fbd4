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
#include "d2oc/coordinator.hpp"
#include "d2oc/models.hpp"
#include "d2oc/mpc.hpp"
#include "d2oc/simulation.hpp"
#include "d2oc/targets.hpp"
#include "d2oc/transport.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace d2oc;

Matrix uniform_points(int d, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(d, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    return m;
}

// Empirical distribution of n points against the 200-sample ring.
void BM_Wasserstein2(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const DiscreteMeasure a = DiscreteMeasure::uniform(uniform_points(2, n, 1));
    const DiscreteMeasure b = DiscreteMeasure::uniform(targets::ring(200, Vector::Zero(2), 1.0, 0.1, 7));
    for (auto _ : state) benchmark::DoNotOptimize(wasserstein2(a, b));
}
BENCHMARK(BM_Wasserstein2)->Arg(30)->Arg(100)->Arg(300)->Arg(903)->Unit(benchmark::kMillisecond);

void BM_LocalTransportPlan(benchmark::State& state) {
    const Matrix samples = uniform_points(2, static_cast<int>(state.range(0)), 2);
    const Vector capacity = Vector::Constant(samples.cols(), 1.0 / samples.cols());
    const Vector y = Vector::Zero(2);
    for (auto _ : state) benchmark::DoNotOptimize(local_transport_plan(y, samples, capacity, 0.01, 25));
}
BENCHMARK(BM_LocalTransportPlan)->Arg(200)->Arg(2000);

void BM_BoxQp(benchmark::State& state) {
    const auto H = static_cast<int>(state.range(0));
    const AgentModel m = models::double_integrator(2, 0.1, 0.0, 0.0);
    const QpAssembler assembler(build_prediction_matrices(m, H));
    const OmegaWeights omega{Vector::Constant(H, 0.03)};
    const Vector mu = Vector::Zero(4);
    const Vector Q = Vector::Constant(2 * H, 3.0);
    const Matrix R = default_input_weight(2, H, 1e-5);
    const InputConstraints box = InputConstraints::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
    for (auto _ : state) {
        const QpProblem qp = assembler.build(omega, mu, Q, R, box);
        benchmark::DoNotOptimize(solve_box_qp(qp));
    }
}
BENCHMARK(BM_BoxQp)->Arg(1)->Arg(5)->Arg(10);

// One decentralized cycle of the three-agent planar scenario.
void BM_RunCycle(benchmark::State& state) {
    ScenarioConfig config;
    config.model.preset = ModelPreset::DoubleIntegrator;
    config.model.sigma_w = 1e-4 * Matrix::Identity(4, 4);
    config.model.sigma_v = 1e-4 * Matrix::Identity(2, 2);
    config.horizon = static_cast<int>(state.range(0));
    config.constraints = InputConstraints::box(Vector::Constant(2, -5.0), Vector::Constant(2, 5.0));
    config.r_scale = 1e-5;
    config.steps = 1000000;
    for (int i = 0; i < 3; ++i) config.agents.push_back({0.3 * i * Vector::Ones(4), Matrix(), std::nullopt});
    std::vector<Agent> agents = make_agents(config, 1);
    SampleField field = SampleField::uniform(targets::ring(200, Vector::Zero(2), 2.0, 0.1, 7), 3);
    const CoordinatorConfig cc = make_coordinator_config(config, 2);
    int step = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_cycle(agents, field, cc, step++));
}
BENCHMARK(BM_RunCycle)->Arg(1)->Arg(5)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
