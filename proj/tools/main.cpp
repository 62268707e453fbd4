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
#include "d2oc/metrics.hpp"
#include "d2oc/scenario.hpp"
#include "d2oc/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace d2oc;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kValidationFailure = 2;

void print_issues(const std::vector<ConfigIssue>& issues) {
    for (const auto& issue : issues) std::cerr << "error: " << issue.to_string() << "\n";
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Returns the config or an exit code when it cannot be used.
std::optional<ScenarioConfig> load_or_report(const std::string& path, int& code) {
    std::vector<std::string> warnings;
    try {
        ScenarioConfig config = load_config(path, &warnings);
        print_warnings(warnings);
        return config;
    } catch (const ConfigError& e) {
        print_warnings(warnings);
        print_issues(e.issues());
        code = kValidationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = kValidationFailure;
    }
    return std::nullopt;
}

void print_fit(const char* label, const ConvergenceFit& fit) {
    std::printf("%s: C=%.6g epsilon=%.6g residual=%.3g tail_variance=%.3g points=%d %s\n", label, fit.C,
                fit.epsilon, fit.residual, fit.tail_variance, fit.points,
                fit.consistent ? "consistent with O(1/k) decay to a floor" : "not consistent with O(1/k) decay");
}

int cmd_validate(const std::string& path) {
    int code = kOk;
    auto config = load_or_report(path, code);
    if (!config) return code;
    std::printf("%s: ok (%zu agents, %d steps, %d runs, controller %s)\n", path.c_str(), config->agents.size(),
                config->steps, config->runs, to_string(config->controller).c_str());
    return kOk;
}

int cmd_run(const std::string& path, std::optional<int> runs, std::optional<std::uint64_t> seed,
            std::optional<std::string> out, bool quiet) {
    int code = kOk;
    auto config = load_or_report(path, code);
    if (!config) return code;

    fs::path dir = ".";
    if (out) {
        dir = *out;
    } else if (const char* env = std::getenv("D2OC_OUTPUT_DIR"); env && *env) {
        dir = env;
    }

    BatchOptions options;
    options.runs = runs;
    options.seed = seed;
    if (!quiet) {
        options.on_run = [](int run, const RunRecord& r) {
            if (r.failed) {
                std::fprintf(stderr, "run %d (seed %llu): failed at step %d: %s\n", run,
                             static_cast<unsigned long long>(r.seed), r.failure_step, r.cause.c_str());
            } else {
                std::fprintf(stderr, "run %d (seed %llu): W2^2 %.6g -> %.6g\n", run,
                             static_cast<unsigned long long>(r.seed), r.initial_w2sq, r.final_w2sq);
            }
        };
    }

    try {
        const MetricsLog log = run_batch(*config, options);
        fs::create_directories(dir);
        const fs::path metrics = dir / (config->name + ".metrics.jsonl");
        const fs::path summary = dir / (config->name + ".summary.csv");
        write_metrics(log, metrics);
        write_summary_csv(log.summary, summary);
        int failed = 0;
        for (const auto& r : log.runs) failed += r.failed ? 1 : 0;
        std::printf("wrote %s\nwrote %s\n", metrics.string().c_str(), summary.string().c_str());
        if (!log.summary.empty()) {
            std::printf("mean W2^2: step %d %.6g -> step %d %.6g\n", log.summary.front().step,
                        log.summary.front().mean_w2sq, log.summary.back().step, log.summary.back().mean_w2sq);
        }
        if (log.batch_fit) print_fit("batch fit", *log.batch_fit);
        if (failed > 0) {
            std::fprintf(stderr, "%d of %zu runs failed\n", failed, log.runs.size());
            return kRuntimeFailure;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    return kOk;
}

int cmd_diagnose(const std::string& path, double fraction) {
    try {
        const MetricsLog log = read_metrics(path);
        std::printf("scenario %s, controller %s, %d runs, %d steps\n", log.meta.scenario.c_str(),
                    log.meta.controller.c_str(), log.meta.runs, log.meta.steps);
        const auto series = log.mean_series();
        if (series.size() < 10) {
            std::fprintf(stderr, "error: need at least 10 evaluation steps, found %zu\n", series.size());
            return kRuntimeFailure;
        }
        const ConvergenceFit fit = convergence_diagnostics(series, fraction);
        std::printf("mean W2^2: step %g %.6g -> step %g %.6g\n", series.front().first, series.front().second,
                    series.back().first, series.back().second);
        print_fit("batch fit", fit);
        int failed = 0;
        for (const auto& r : log.runs) {
            if (r.failed) {
                ++failed;
                std::printf("run %d failed at step %d: %s\n", r.run, r.failure_step, r.cause.c_str());
            }
        }
        std::printf("%d of %zu runs failed\n", failed, log.runs.size());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    return kOk;
}

int cmd_compare(const std::string& path_a, const std::string& path_b) {
    try {
        const MetricsLog a = read_metrics(path_a);
        const MetricsLog b = read_metrics(path_b);
        if (a.summary.empty() || b.summary.empty()) {
            std::fprintf(stderr, "error: metrics without summary rows\n");
            return kRuntimeFailure;
        }
        const auto& fa = a.summary.back();
        const auto& fb = b.summary.back();
        std::printf("A %s (%s): final mean W2^2 %.6g (std %.3g, step %d)\n", a.meta.scenario.c_str(),
                    a.meta.controller.c_str(), fa.mean_w2sq, fa.std_w2sq, fa.step);
        std::printf("B %s (%s): final mean W2^2 %.6g (std %.3g, step %d)\n", b.meta.scenario.c_str(),
                    b.meta.controller.c_str(), fb.mean_w2sq, fb.std_w2sq, fb.step);

        // Paired comparison over runs sharing a seed.
        std::map<std::uint64_t, double> by_seed;
        for (const auto& r : a.runs) {
            if (!r.failed) by_seed[r.seed] = r.final_w2sq;
        }
        int pairs = 0;
        int a_better = 0;
        for (const auto& r : b.runs) {
            auto it = by_seed.find(r.seed);
            if (r.failed || it == by_seed.end()) continue;
            ++pairs;
            a_better += it->second < r.final_w2sq ? 1 : 0;
        }
        if (pairs > 0) std::printf("paired seeds: %d, A lower final W2^2 in %d\n", pairs, a_better);
        const char* verdict = fa.mean_w2sq < fb.mean_w2sq ? "A" : (fb.mean_w2sq < fa.mean_w2sq ? "B" : "tie");
        std::printf("lower final mean W2^2: %s\n", verdict);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density-driven optimal control of stochastic LTI swarms"};
    app.require_subcommand(1);

    std::string config_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario config and report every issue");
    validate->add_option("config", config_path, "Scenario TOML file")->required();

    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Run a Monte Carlo batch and write metrics");
    run->add_option("config", config_path, "Scenario TOML file")->required();
    run->add_option("--runs", runs, "Number of runs (overrides the config)")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base seed (overrides the config)");
    run->add_option("--out", out, "Output directory (default: $D2OC_OUTPUT_DIR or .)");
    run->add_flag("-q,--quiet", quiet, "No per-run progress");

    std::string metrics_path;
    double fraction = 0.25;
    auto* diagnose = app.add_subcommand("diagnose", "Fit the batch-mean W2^2 series to epsilon + C/k");
    diagnose->add_option("metrics", metrics_path, "Metrics JSONL file")->required();
    diagnose->add_option("--residual-fraction", fraction, "Consistency threshold relative to tail variance");

    std::string metrics_b;
    auto* compare = app.add_subcommand("compare", "Compare the final W2^2 of two batches");
    compare->add_option("metricsA", metrics_path, "First metrics file")->required();
    compare->add_option("metricsB", metrics_b, "Second metrics file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidationFailure;
    }

    if (*validate) return cmd_validate(config_path);
    if (*run) return cmd_run(config_path, runs, seed, out, quiet);
    if (*diagnose) return cmd_diagnose(metrics_path, fraction);
    if (*compare) return cmd_compare(metrics_path, metrics_b);
    return kValidationFailure;
}
