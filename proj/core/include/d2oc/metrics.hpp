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
#ifndef D2OC_METRICS_HPP
#define D2OC_METRICS_HPP

#include "d2oc/diagnostics.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace d2oc {

/// Swarm-level snapshot at one W2 evaluation step of one run.
struct StepRecord {
    int run = 0;
    int step = 0;
    double w2sq = 0.0;
    int comm_edges = 0;
    double proj_dist_mean = 0.0;
    double obj_mean = 0.0;            // mean QP objective over agents
    double const_term = 0.0;          // mean U-independent cost terms
    double expected_cost_mean = 0.0;  // mean directly evaluated expected cost
    double input_norm_mean = 0.0;
    int support_size = 0;    // points in the empirical distribution
    int w2_sample_size = 0;  // points used for W2 (after subsampling)
    int idle_agents = 0;

    bool operator==(const StepRecord&) const = default;
};

struct RunRecord {
    int run = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    int failure_step = -1;
    std::string cause;
    double initial_w2sq = 0.0;
    double final_w2sq = 0.0;
    std::optional<ConvergenceFit> fit;

    bool operator==(const RunRecord&) const = default;
};

struct SummaryRow {
    int step = 0;
    double mean_w2sq = 0.0;
    double std_w2sq = 0.0;  // population standard deviation across runs
    int count = 0;

    bool operator==(const SummaryRow&) const = default;
};

struct MetricsMeta {
    std::string scenario;
    std::string controller;
    int runs = 0;
    std::uint64_t seed = 0;
    int steps = 0;
    int stride = 0;
    int agents = 0;
    std::string created;  // UTC timestamp, the only nondeterministic field

    bool operator==(const MetricsMeta&) const = default;
};

struct MetricsLog {
    MetricsMeta meta;
    std::vector<StepRecord> steps;
    std::vector<RunRecord> runs;
    std::vector<SummaryRow> summary;
    std::optional<ConvergenceFit> batch_fit;

    bool operator==(const MetricsLog&) const = default;

    /// (step, mean W2^2) pairs of the batch summary.
    std::vector<std::pair<double, double>> mean_series() const;
};

/// Per-step mean and population std of w2sq across runs, ordered by step.
std::vector<SummaryRow> aggregate_steps(const std::vector<StepRecord>& steps);

std::string utc_timestamp();

/// JSON lines: one meta line, then step, run, summary and batch records.
void write_jsonl(const MetricsLog& log, std::ostream& out);
MetricsLog read_jsonl(std::istream& in);

void write_metrics(const MetricsLog& log, const std::filesystem::path& path);
MetricsLog read_metrics(const std::filesystem::path& path);

/// CSV with header "step,mean_w2sq,std_w2sq".
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

}  // namespace d2oc

#endif  // D2OC_METRICS_HPP
