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
#ifndef D2OC_SCENARIO_HPP
#define D2OC_SCENARIO_HPP

#include "d2oc/coordinator.hpp"
#include "d2oc/lti_model.hpp"
#include "d2oc/models.hpp"
#include "d2oc/mpc.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2oc {

enum class ModelPreset { Explicit, DoubleIntegrator, QuadrotorHover };

struct ModelSpec {
    ModelPreset preset = ModelPreset::Explicit;
    double dt = 0.1;
    int axes = 2;                    // double integrator
    models::HoverParameters hover;   // quadrotor (dt taken from `dt`)
    Matrix A, B, C;                  // explicit
    Matrix sigma_w, sigma_v;
    std::optional<int> expected_relative_degree;

    bool operator==(const ModelSpec& other) const;
};

struct AgentSpec {
    Vector initial_mean;
    Matrix initial_covariance;
    std::optional<ModelSpec> model;  // overrides the scenario model

    bool operator==(const AgentSpec& other) const;
};

enum class TargetGenerator { Points, Ring, Grid, Torus };

struct TargetSpec {
    TargetGenerator generator = TargetGenerator::Points;
    Matrix points;  // d x N, Points
    int count = 0;  // Ring, Torus
    Vector center;
    double radius = 1.0;      // Ring
    double radial_std = 0.0;  // Ring
    double major_radius = 2.0;
    double minor_radius = 1.0;
    Vector lower, upper;  // Grid
    int per_axis = 0;     // Grid
    std::uint64_t seed = 0;

    bool operator==(const TargetSpec& other) const;
};

struct ScenarioConfig {
    std::string name = "scenario";
    ModelSpec model;
    std::vector<AgentSpec> agents;
    TargetSpec target;

    int horizon = 1;
    InputConstraints constraints;
    double r_scale = 0.01;
    double comm_range = 5.0;
    int steps = 100;                   // mission length K
    std::optional<int> mass_steps;     // M_i; per-step mass is 1 / M_i, default K
    double confidence = 0.95;
    SelectionMode selection = SelectionMode::Hard;
    double lambda = 1.0;
    int knn = 25;
    WeightRule weight_rule = WeightRule::Transport;
    double radius_sigma = 0.1;
    ControllerKind controller = ControllerKind::D2oc;
    EstimatorKind estimator = EstimatorKind::Oracle;
    ExhaustionPolicy on_exhaustion = ExhaustionPolicy::Idle;
    GreedyGains greedy;

    int runs = 1;
    std::uint64_t seed = 0;
    int w2_stride = 5;
    int w2_subsample = 1000;

    bool operator==(const ScenarioConfig& other) const;

    double agent_mass() const { return 1.0 / static_cast<double>(mass_steps.value_or(steps)); }
};

struct ConfigIssue {
    std::string field;
    std::string message;
    int line = 0;  // 0 when unknown

    std::string to_string() const;
};

/// Parse or validation failure carrying every issue found.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct ValidationReport {
    std::vector<ConfigIssue> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

/// Parses TOML text; throws ConfigError listing every parse or validation error.
ScenarioConfig parse_config(const std::string& text, const std::string& source_name = "<string>",
                            std::vector<std::string>* warnings = nullptr);

ScenarioConfig load_config(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Semantic checks on a parsed config. Line numbers are filled when known.
ValidationReport validate_config(const ScenarioConfig& config);

std::string serialize_config(const ScenarioConfig& config);

AgentModel build_model(const ModelSpec& spec);
Matrix target_points(const TargetSpec& spec);

std::string to_string(ControllerKind kind);
std::string to_string(ConstraintMode mode);

}  // namespace d2oc

#endif  // D2OC_SCENARIO_HPP
