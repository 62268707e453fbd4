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

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace d2oc {

using Json = nlohmann::ordered_json;

namespace {

Json fit_to_json(const ConvergenceFit& f) {
    return Json{{"C", f.C},
                {"epsilon", f.epsilon},
                {"residual", f.residual},
                {"tail_variance", f.tail_variance},
                {"points", f.points},
                {"consistent", f.consistent}};
}

ConvergenceFit fit_from_json(const Json& j) {
    ConvergenceFit f;
    f.C = j.at("C").get<double>();
    f.epsilon = j.at("epsilon").get<double>();
    f.residual = j.at("residual").get<double>();
    f.tail_variance = j.at("tail_variance").get<double>();
    f.points = j.at("points").get<int>();
    f.consistent = j.at("consistent").get<bool>();
    return f;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::pair<double, double>> MetricsLog::mean_series() const {
    std::vector<std::pair<double, double>> s;
    s.reserve(summary.size());
    for (const auto& row : summary) s.emplace_back(row.step, row.mean_w2sq);
    return s;
}

std::vector<SummaryRow> aggregate_steps(const std::vector<StepRecord>& steps) {
    std::map<int, std::vector<double>> by_step;
    for (const auto& r : steps) by_step[r.step].push_back(r.w2sq);
    std::vector<SummaryRow> rows;
    for (const auto& [step, values] : by_step) {
        SummaryRow row;
        row.step = step;
        row.count = static_cast<int>(values.size());
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= row.count;
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        row.mean_w2sq = mean;
        row.std_w2sq = std::sqrt(var / row.count);
        rows.push_back(row);
    }
    return rows;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_jsonl(const MetricsLog& log, std::ostream& out) {
    const MetricsMeta& m = log.meta;
    out << Json{{"type", "meta"},
                {"scenario", m.scenario},
                {"controller", m.controller},
                {"runs", m.runs},
                {"seed", m.seed},
                {"steps", m.steps},
                {"stride", m.stride},
                {"agents", m.agents},
                {"created", m.created}}
               .dump()
        << '\n';
    for (const StepRecord& s : log.steps) {
        out << Json{{"type", "step"},
                    {"run", s.run},
                    {"step", s.step},
                    {"w2sq", s.w2sq},
                    {"comm_edges", s.comm_edges},
                    {"proj_dist_mean", s.proj_dist_mean},
                    {"obj_mean", s.obj_mean},
                    {"const_term", s.const_term},
                    {"expected_cost_mean", s.expected_cost_mean},
                    {"input_norm_mean", s.input_norm_mean},
                    {"support_size", s.support_size},
                    {"w2_sample_size", s.w2_sample_size},
                    {"idle_agents", s.idle_agents}}
                   .dump()
            << '\n';
    }
    for (const RunRecord& r : log.runs) {
        Json j{{"type", "run"},
               {"run", r.run},
               {"seed", r.seed},
               {"status", r.failed ? "failed" : "ok"},
               {"initial_w2sq", r.initial_w2sq},
               {"final_w2sq", r.final_w2sq}};
        if (r.failed) {
            j["failure_step"] = r.failure_step;
            j["cause"] = r.cause;
        }
        if (r.fit) j["fit"] = fit_to_json(*r.fit);
        out << j.dump() << '\n';
    }
    for (const SummaryRow& s : log.summary) {
        out << Json{{"type", "summary"},
                    {"step", s.step},
                    {"mean_w2sq", s.mean_w2sq},
                    {"std_w2sq", s.std_w2sq},
                    {"count", s.count}}
                   .dump()
            << '\n';
    }
    if (log.batch_fit) out << Json{{"type", "batch"}, {"fit", fit_to_json(*log.batch_fit)}}.dump() << '\n';
}

MetricsLog read_jsonl(std::istream& in) {
    MetricsLog log;
    std::string line;
    int number = 0;
    bool have_meta = false;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        try {
            const Json j = Json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "meta") {
                MetricsMeta& m = log.meta;
                m.scenario = j.at("scenario").get<std::string>();
                m.controller = j.at("controller").get<std::string>();
                m.runs = j.at("runs").get<int>();
                m.seed = j.at("seed").get<std::uint64_t>();
                m.steps = j.at("steps").get<int>();
                m.stride = j.at("stride").get<int>();
                m.agents = j.at("agents").get<int>();
                m.created = j.at("created").get<std::string>();
                have_meta = true;
            } else if (type == "step") {
                StepRecord s;
                s.run = j.at("run").get<int>();
                s.step = j.at("step").get<int>();
                s.w2sq = j.at("w2sq").get<double>();
                s.comm_edges = j.at("comm_edges").get<int>();
                s.proj_dist_mean = j.at("proj_dist_mean").get<double>();
                s.obj_mean = j.at("obj_mean").get<double>();
                s.const_term = j.at("const_term").get<double>();
                s.expected_cost_mean = j.at("expected_cost_mean").get<double>();
                s.input_norm_mean = j.at("input_norm_mean").get<double>();
                s.support_size = j.at("support_size").get<int>();
                s.w2_sample_size = j.at("w2_sample_size").get<int>();
                s.idle_agents = j.at("idle_agents").get<int>();
                log.steps.push_back(s);
            } else if (type == "run") {
                RunRecord r;
                r.run = j.at("run").get<int>();
                r.seed = j.at("seed").get<std::uint64_t>();
                r.failed = j.at("status").get<std::string>() == "failed";
                r.initial_w2sq = j.at("initial_w2sq").get<double>();
                r.final_w2sq = j.at("final_w2sq").get<double>();
                if (r.failed) {
                    r.failure_step = j.at("failure_step").get<int>();
                    r.cause = j.at("cause").get<std::string>();
                }
                if (j.contains("fit")) r.fit = fit_from_json(j.at("fit"));
                log.runs.push_back(r);
            } else if (type == "summary") {
                SummaryRow s;
                s.step = j.at("step").get<int>();
                s.mean_w2sq = j.at("mean_w2sq").get<double>();
                s.std_w2sq = j.at("std_w2sq").get<double>();
                s.count = j.at("count").get<int>();
                log.summary.push_back(s);
            } else if (type == "batch") {
                log.batch_fit = fit_from_json(j.at("fit"));
            } else {
                throw std::runtime_error("unknown record type \"" + type + "\"");
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("metrics line " + std::to_string(number) + ": " + e.what());
        }
    }
    if (!have_meta) throw std::runtime_error("metrics stream has no meta record");
    return log;
}

void write_metrics(const MetricsLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_jsonl(log, out);
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

MetricsLog read_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics file " + path.string());
    try {
        return read_jsonl(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << "step,mean_w2sq,std_w2sq\n";
    for (const auto& r : rows) out << r.step << ',' << format_double(r.mean_w2sq) << ',' << format_double(r.std_w2sq) << '\n';
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_summary_csv(rows, out);
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "step,mean_w2sq,std_w2sq") {
        throw std::runtime_error("summary CSV has an unexpected header");
    }
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        SummaryRow r;
        char c1 = 0, c2 = 0;
        if (!(ss >> r.step >> c1 >> r.mean_w2sq >> c2 >> r.std_w2sq) || c1 != ',' || c2 != ',') {
            throw std::runtime_error("malformed summary CSV row: " + line);
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace d2oc
