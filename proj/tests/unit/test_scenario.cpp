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
#include "d2oc/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>

using namespace d2oc;

namespace {

const std::string kScenarioDir = D2OC_SCENARIO_DIR;

const char* kMinimal = R"(
name = "minimal"
[mission]
steps = 20
[model]
preset = "double_integrator"
axes = 1
dt = 0.1
sigma_w = 0.0
sigma_v = 0.0
[control]
horizon = 2
[target]
generator = "points"
points = { rows = 3, cols = 1, data = [0.0, 0.5, 1.0] }
[[agents]]
initial_mean = [0.0, 0.0]
)";

bool mentions(const ConfigError& e, const std::string& field) {
    return std::any_of(e.issues().begin(), e.issues().end(),
                       [&](const ConfigIssue& i) { return i.field == field; });
}

}  // namespace

TEST_CASE("quadrotor scenario loads") {
    std::vector<std::string> warnings;
    const ScenarioConfig c = load_config(kScenarioDir + "/quadrotor_paper.toml", &warnings);
    CHECK(c.agents.size() == 3);
    CHECK(c.horizon == 1);
    CHECK(c.comm_range == doctest::Approx(5.0));
    CHECK(c.runs == 100);
    const AgentModel m = build_model(c.model);
    CHECK(m.state_dim() == 12);
    CHECK(m.input_dim() == 4);
    CHECK(m.output_dim() == 3);
    CHECK((m.sigma_w() - 0.2 * Matrix::Identity(12, 12)).norm() < 1e-15);
    CHECK((m.sigma_v() - 0.5 * Matrix::Identity(3, 3)).norm() < 1e-15);
    for (const auto& a : c.agents) CHECK((a.initial_covariance - 4.0 * Matrix::Identity(12, 12)).norm() < 1e-15);
    CHECK(target_points(c.target).cols() == 400);
    // The declared relative degree does not match the hover model.
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("shipped scenarios validate and round trip") {
    for (const char* name : {"double_integrator_2d.toml", "greedy_baseline.toml", "quadrotor_paper.toml"}) {
        CAPTURE(name);
        const ScenarioConfig c = load_config(kScenarioDir + "/" + name);
        CHECK(validate_config(c).ok());
        const ScenarioConfig again = parse_config(serialize_config(c));
        CHECK(again == c);
    }
}

TEST_CASE("minimal config and defaults") {
    const ScenarioConfig c = parse_config(kMinimal);
    CHECK(c.name == "minimal");
    CHECK(c.runs == 1);
    CHECK(c.constraints.mode == ConstraintMode::None);
    CHECK(c.agent_mass() == doctest::Approx(1.0 / 20.0));
    CHECK(c.agents[0].initial_covariance.norm() == 0.0);
    CHECK(target_points(c.target).cols() == 3);
    CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("invalid configs name the offending field") {
    SUBCASE("zero horizon") {
        std::string text = kMinimal;
        text.replace(text.find("horizon = 2"), 11, "horizon = 0");
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "control.horizon"));
            CHECK(std::string(e.what()).find("control.horizon") != std::string::npos);
        }
    }
    SUBCASE("several errors are reported together") {
        std::string text = kMinimal;
        text.replace(text.find("horizon = 2"), 11, "horizon = -1\nr_scale = -1.0");
        text.replace(text.find("steps = 20"), 10, "steps = 0");
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "control.horizon"));
            CHECK(mentions(e, "control.r_scale"));
            CHECK(mentions(e, "mission.steps"));
        }
    }
    SUBCASE("unknown key") {
        std::string text = kMinimal;
        text.replace(text.find("horizon = 2"), 11, "horizon = 2\nhorizn = 3");
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(mentions(e, "control.horizn"));
            CHECK(e.issues().front().line > 0);
        }
    }
    SUBCASE("wrong initial mean length") {
        std::string text = kMinimal;
        text.replace(text.find("initial_mean = [0.0, 0.0]"), 25, "initial_mean = [0.0]");
        CHECK_THROWS_AS(parse_config(text), ConfigError);
    }
    SUBCASE("malformed toml") {
        CHECK_THROWS_AS(parse_config("name = "), ConfigError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_config("/nonexistent/scenario.toml"), ConfigError);
    }
}
