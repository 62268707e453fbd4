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

#include "d2oc/targets.hpp"

#include <toml.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace d2oc {

namespace {

bool same(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

bool same(const Vector& a, const Vector& b) {
    return a.size() == b.size() && (a.size() == 0 || a == b);
}

template <typename E>
struct EnumName {
    E value;
    const char* name;
};

constexpr EnumName<ModelPreset> kPresets[] = {{ModelPreset::Explicit, "explicit"},
                                              {ModelPreset::DoubleIntegrator, "double_integrator"},
                                              {ModelPreset::QuadrotorHover, "quadrotor_hover"}};
constexpr EnumName<TargetGenerator> kGenerators[] = {{TargetGenerator::Points, "points"},
                                                     {TargetGenerator::Ring, "ring"},
                                                     {TargetGenerator::Grid, "grid"},
                                                     {TargetGenerator::Torus, "torus"}};
constexpr EnumName<ConstraintMode> kConstraintModes[] = {
    {ConstraintMode::None, "none"}, {ConstraintMode::Box, "box"}, {ConstraintMode::Ball, "ball"}};
constexpr EnumName<SelectionMode> kSelectionModes[] = {{SelectionMode::Hard, "hard"},
                                                       {SelectionMode::Soft, "soft"}};
constexpr EnumName<ControllerKind> kControllers[] = {{ControllerKind::D2oc, "d2oc"},
                                                     {ControllerKind::Greedy, "greedy"}};
constexpr EnumName<EstimatorKind> kEstimators[] = {{EstimatorKind::Oracle, "oracle"},
                                                   {EstimatorKind::Kalman, "kalman"}};
constexpr EnumName<ExhaustionPolicy> kExhaustion[] = {{ExhaustionPolicy::Idle, "idle"},
                                                      {ExhaustionPolicy::Reset, "reset"}};
constexpr EnumName<WeightRule> kWeightRules[] = {{WeightRule::Transport, "transport"},
                                                 {WeightRule::Radius, "radius"}};

template <typename E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E value) {
    for (const auto& e : table) {
        if (e.value == value) return e.name;
    }
    return "?";
}

template <typename E, std::size_t N>
std::string choices(const EnumName<E> (&table)[N]) {
    std::string out;
    for (const auto& e : table) out += (out.empty() ? "" : ", ") + std::string("\"") + e.name + "\"";
    return out;
}

int state_dim_of(const ModelSpec& spec) {
    switch (spec.preset) {
        case ModelPreset::DoubleIntegrator: return 2 * spec.axes;
        case ModelPreset::QuadrotorHover: return 12;
        case ModelPreset::Explicit: return static_cast<int>(spec.A.rows());
    }
    return 0;
}

int output_dim_of(const ModelSpec& spec) {
    switch (spec.preset) {
        case ModelPreset::DoubleIntegrator: return spec.axes;
        case ModelPreset::QuadrotorHover: return 3;
        case ModelPreset::Explicit: return static_cast<int>(spec.C.rows());
    }
    return 0;
}

class Reader {
public:
    std::vector<ConfigIssue> errors;
    std::map<std::string, int> lines;

    static int line_of(const toml::node& n) { return static_cast<int>(n.source().begin.line); }

    void fail(const std::string& field, const std::string& message, int line) {
        errors.push_back({field, message, line});
    }

    void check_keys(const toml::table& t, const std::string& path, std::set<std::string> known) {
        for (const auto& [key, node] : t) {
            const std::string k(key.str());
            if (!known.count(k)) fail(join(path, k), "unknown key", line_of(node));
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

    const toml::node* find(const toml::table& t, const std::string& key, const std::string& path,
                           bool required, int parent_line) {
        const toml::node* n = t.get(key);
        const std::string field = join(path, key);
        if (!n) {
            if (required) fail(field, "required key is missing", parent_line);
            return nullptr;
        }
        lines[field] = line_of(*n);
        return n;
    }

    const toml::table* table(const toml::table& t, const std::string& key, const std::string& path,
                             bool required, int parent_line) {
        const toml::node* n = find(t, key, path, required, parent_line);
        if (!n) return nullptr;
        if (!n->is_table()) {
            fail(join(path, key), "expected a table", line_of(*n));
            return nullptr;
        }
        return n->as_table();
    }

    std::optional<double> number(const toml::table& t, const std::string& key, const std::string& path,
                                 bool required = false, int parent_line = 0) {
        const toml::node* n = find(t, key, path, required, parent_line);
        if (!n) return std::nullopt;
        if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return *v;
        fail(join(path, key), "expected a number", line_of(*n));
        return std::nullopt;
    }

    std::optional<std::int64_t> integer(const toml::table& t, const std::string& key, const std::string& path,
                                        bool required = false, int parent_line = 0) {
        const toml::node* n = find(t, key, path, required, parent_line);
        if (!n) return std::nullopt;
        if (n->is_integer()) return *n->value<std::int64_t>();
        fail(join(path, key), "expected an integer", line_of(*n));
        return std::nullopt;
    }

    std::optional<std::string> string(const toml::table& t, const std::string& key, const std::string& path,
                                      bool required = false, int parent_line = 0) {
        const toml::node* n = find(t, key, path, required, parent_line);
        if (!n) return std::nullopt;
        if (n->is_string()) return *n->value<std::string>();
        fail(join(path, key), "expected a string", line_of(*n));
        return std::nullopt;
    }

    template <typename E, std::size_t N>
    void choice(const toml::table& t, const std::string& key, const std::string& path,
                const EnumName<E> (&table)[N], E& out) {
        const auto s = string(t, key, path);
        if (!s) return;
        for (const auto& e : table) {
            if (*s == e.name) {
                out = e.value;
                return;
            }
        }
        fail(join(path, key), "expected one of " + choices(table) + ", got \"" + *s + "\"",
             lines[join(path, key)]);
    }

    std::optional<Vector> numbers(const toml::node& n, const std::string& field) {
        const toml::array* arr = n.as_array();
        if (!arr) {
            fail(field, "expected an array of numbers", line_of(n));
            return std::nullopt;
        }
        Vector v(static_cast<Eigen::Index>(arr->size()));
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const toml::node& e = *arr->get(i);
            const auto x = e.value<double>();
            if (!x || !(e.is_floating_point() || e.is_integer())) {
                fail(field, "element " + std::to_string(i) + " is not a number", line_of(e));
                return std::nullopt;
            }
            v(static_cast<Eigen::Index>(i)) = *x;
        }
        return v;
    }

    std::optional<Vector> vector(const toml::table& t, const std::string& key, const std::string& path,
                                 bool required = false, int parent_line = 0) {
        const toml::node* n = find(t, key, path, required, parent_line);
        if (!n) return std::nullopt;
        return numbers(*n, join(path, key));
    }

    /// {rows, cols, data} in row-major order, or a scalar s meaning s * I(identity_dim).
    std::optional<Matrix> matrix(const toml::table& t, const std::string& key, const std::string& path,
                                 bool required, int parent_line, int identity_dim = 0) {
        const toml::node* n = find(t, key, path, required, parent_line);
        if (!n) return std::nullopt;
        const std::string field = join(path, key);
        if (n->is_integer() || n->is_floating_point()) {
            if (identity_dim <= 0) {
                fail(field, "a scalar shorthand needs a known dimension; give {rows, cols, data}", line_of(*n));
                return std::nullopt;
            }
            return Matrix(*n->value<double>() * Matrix::Identity(identity_dim, identity_dim));
        }
        const toml::table* m = n->as_table();
        if (!m) {
            fail(field, "expected {rows, cols, data} or a scalar", line_of(*n));
            return std::nullopt;
        }
        check_keys(*m, field, {"rows", "cols", "data"});
        const auto rows = integer(*m, "rows", field, true, line_of(*n));
        const auto cols = integer(*m, "cols", field, true, line_of(*n));
        const auto data = vector(*m, "data", field, true, line_of(*n));
        if (!rows || !cols || !data) return std::nullopt;
        if (*rows < 1 || *cols < 1) {
            fail(field, "rows and cols must be >= 1", line_of(*n));
            return std::nullopt;
        }
        if (data->size() != *rows * *cols) {
            fail(field, "data has " + std::to_string(data->size()) + " entries, expected rows*cols = " +
                            std::to_string(*rows * *cols),
                 line_of(*n));
            return std::nullopt;
        }
        Matrix out(*rows, *cols);
        for (Eigen::Index i = 0; i < *rows; ++i) {
            for (Eigen::Index j = 0; j < *cols; ++j) out(i, j) = (*data)(i * *cols + j);
        }
        return out;
    }
};

ModelSpec read_model(Reader& rd, const toml::table& t, const std::string& path) {
    rd.check_keys(t, path, {"preset", "dt", "axes", "mass", "gravity", "inertia", "A", "B", "C", "sigma_w",
                            "sigma_v", "expected_relative_degree"});
    const int line = Reader::line_of(t);
    ModelSpec spec;
    rd.choice(t, "preset", path, kPresets, spec.preset);
    if (auto v = rd.number(t, "dt", path)) spec.dt = *v;
    if (auto v = rd.integer(t, "axes", path)) spec.axes = static_cast<int>(*v);
    if (auto v = rd.number(t, "mass", path)) spec.hover.mass = *v;
    if (auto v = rd.number(t, "gravity", path)) spec.hover.gravity = *v;
    if (auto v = rd.vector(t, "inertia", path)) {
        if (v->size() == 3) {
            spec.hover.inertia_roll = (*v)(0);
            spec.hover.inertia_pitch = (*v)(1);
            spec.hover.inertia_yaw = (*v)(2);
        } else {
            rd.fail(Reader::join(path, "inertia"), "expected [roll, pitch, yaw]", rd.lines[Reader::join(path, "inertia")]);
        }
    }
    spec.hover.dt = spec.dt;
    const bool explicit_model = spec.preset == ModelPreset::Explicit;
    if (auto m = rd.matrix(t, "A", path, explicit_model, line)) spec.A = *m;
    if (auto m = rd.matrix(t, "B", path, explicit_model, line)) spec.B = *m;
    if (auto m = rd.matrix(t, "C", path, explicit_model, line)) spec.C = *m;
    if (auto m = rd.matrix(t, "sigma_w", path, true, line, state_dim_of(spec))) spec.sigma_w = *m;
    if (auto m = rd.matrix(t, "sigma_v", path, true, line, output_dim_of(spec))) spec.sigma_v = *m;
    if (auto v = rd.integer(t, "expected_relative_degree", path)) spec.expected_relative_degree = static_cast<int>(*v);
    return spec;
}

toml::table write_matrix(const Matrix& m) {
    toml::array data;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    }
    return toml::table{{"rows", static_cast<std::int64_t>(m.rows())},
                       {"cols", static_cast<std::int64_t>(m.cols())},
                       {"data", std::move(data)}};
}

toml::array write_vector(const Vector& v) {
    toml::array a;
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

toml::table write_model(const ModelSpec& s) {
    toml::table t;
    t.insert("preset", name_of(kPresets, s.preset));
    t.insert("dt", s.dt);
    t.insert("axes", static_cast<std::int64_t>(s.axes));
    t.insert("mass", s.hover.mass);
    t.insert("gravity", s.hover.gravity);
    t.insert("inertia", toml::array{s.hover.inertia_roll, s.hover.inertia_pitch, s.hover.inertia_yaw});
    if (s.A.size()) t.insert("A", write_matrix(s.A));
    if (s.B.size()) t.insert("B", write_matrix(s.B));
    if (s.C.size()) t.insert("C", write_matrix(s.C));
    if (s.sigma_w.size()) t.insert("sigma_w", write_matrix(s.sigma_w));
    if (s.sigma_v.size()) t.insert("sigma_v", write_matrix(s.sigma_v));
    if (s.expected_relative_degree) t.insert("expected_relative_degree", static_cast<std::int64_t>(*s.expected_relative_degree));
    return t;
}

void check_psd(const Matrix& m, int dim, const std::string& field, const std::map<std::string, int>* lines,
               std::vector<ConfigIssue>& errors) {
    auto line = [&] { return lines && lines->count(field) ? lines->at(field) : 0; };
    if (m.rows() != dim || m.cols() != dim) {
        errors.push_back({field, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix, got " +
                                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()),
                          line()});
        return;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        errors.push_back({field, "matrix must be finite and symmetric", line()});
        return;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
        errors.push_back({field, "matrix must be positive semidefinite", line()});
    }
}

ValidationReport validate_impl(const ScenarioConfig& c, const std::map<std::string, int>* lines) {
    ValidationReport rep;
    auto line = [&](const std::string& f) { return lines && lines->count(f) ? lines->at(f) : 0; };
    auto err = [&](const std::string& f, const std::string& msg) { rep.errors.push_back({f, msg, line(f)}); };

    if (c.steps < 1) err("mission.steps", "mission length must be >= 1");
    if (c.runs < 1) err("mission.runs", "run count must be >= 1");
    if (c.mass_steps && *c.mass_steps < 1) err("mission.mass_steps", "must be >= 1");
    if (c.horizon < 1) err("control.horizon", "horizon H must be >= 1");
    if (!(c.r_scale > 0.0)) err("control.r_scale", "input weight scale must be positive");
    if (!(c.comm_range > 0.0)) err("communication.range", "communication range must be positive");
    if (!(c.confidence > 0.0 && c.confidence < 1.0)) err("selection.confidence", "confidence must lie in (0, 1)");
    if (!(c.lambda > 0.0)) err("selection.lambda", "soft-constraint weight must be positive");
    if (c.knn < 0) err("selection.knn", "must be >= 0 (0 disables the candidate pool)");
    if (!(c.radius_sigma > 0.0)) err("selection.radius_sigma", "must be positive");
    if (c.w2_stride < 1) err("metrics.w2_stride", "must be >= 1");
    if (c.w2_subsample < 1) err("metrics.w2_subsample", "must be >= 1");
    if (!(c.greedy.dt > 0.0)) err("baseline.dt", "must be positive");
    if (c.agents.empty()) err("agents", "at least one agent is required");

    auto build = [&](const ModelSpec& spec, const std::string& path) -> std::optional<AgentModel> {
        if (spec.preset == ModelPreset::DoubleIntegrator && spec.axes < 1) {
            err(path + ".axes", "must be >= 1");
            return std::nullopt;
        }
        if (spec.preset != ModelPreset::Explicit && !(spec.dt > 0.0)) {
            err(path + ".dt", "must be positive");
            return std::nullopt;
        }
        const int n = state_dim_of(spec);
        const int d = output_dim_of(spec);
        std::size_t before = rep.errors.size();
        if (spec.preset == ModelPreset::Explicit) {
            if (spec.A.rows() != spec.A.cols()) err(path + ".A", "A must be square");
            if (spec.B.rows() != spec.A.rows()) err(path + ".B", "B must have as many rows as A");
            if (spec.C.cols() != spec.A.rows()) err(path + ".C", "C must have as many columns as A");
        }
        check_psd(spec.sigma_w, n, path + ".sigma_w", lines, rep.errors);
        check_psd(spec.sigma_v, d, path + ".sigma_v", lines, rep.errors);
        if (rep.errors.size() != before) return std::nullopt;
        try {
            AgentModel model = build_model(spec);
            const AssumptionReport a = check_assumptions(model);
            if (!a.controllable) {
                err(path, "(A, B) is not controllable: rank " + std::to_string(a.controllability_rank) + " < " +
                              std::to_string(n));
            }
            if (!a.marginally_stable) {
                std::string why;
                for (const auto& s : a.details) why += (why.empty() ? "" : "; ") + s;
                rep.warnings.push_back(path + ": A is not marginally stable (" + why + ")");
            }
            const auto r = relative_degree(model);
            if (!r) {
                err(path, "output relative degree is undefined (C A^l B = 0 for all l < n)");
            } else if (spec.expected_relative_degree && *spec.expected_relative_degree != *r) {
                rep.warnings.push_back(path + ".expected_relative_degree: declared " +
                                       std::to_string(*spec.expected_relative_degree) +
                                       " but the model has output relative degree " + std::to_string(*r));
            }
            return model;
        } catch (const std::exception& e) {
            err(path, e.what());
        }
        return std::nullopt;
    };

    const std::optional<AgentModel> base = build(c.model, "model");
    int input_dim = base ? base->input_dim() : -1;
    int output_dim = base ? base->output_dim() : -1;
    for (std::size_t i = 0; i < c.agents.size(); ++i) {
        const AgentSpec& a = c.agents[i];
        const std::string path = "agents[" + std::to_string(i) + "]";
        std::optional<AgentModel> own;
        if (a.model) {
            own = build(*a.model, path + ".model");
            if (own && input_dim > 0 && own->input_dim() != input_dim) {
                err(path + ".model", "all agents must share the input dimension");
            }
            if (own && output_dim > 0 && own->output_dim() != output_dim) {
                err(path + ".model", "all agents must share the output dimension");
            }
        }
        const std::optional<AgentModel>& m = a.model ? own : base;
        if (!m) continue;
        if (a.initial_mean.size() != m->state_dim()) {
            err(path + ".initial_mean", "expected " + std::to_string(m->state_dim()) + " entries, got " +
                                            std::to_string(a.initial_mean.size()));
        }
        if (a.initial_covariance.size()) {
            check_psd(a.initial_covariance, m->state_dim(), path + ".initial_covariance", lines, rep.errors);
        }
    }

    if (c.constraints.mode == ConstraintMode::Box) {
        if (c.constraints.u_min.size() != c.constraints.u_max.size()) {
            err("control.u_max", "u_min and u_max differ in length");
        } else if (input_dim > 0 && c.constraints.u_min.size() != input_dim) {
            err("control.u_min", "expected " + std::to_string(input_dim) + " entries (one per input)");
        } else if ((c.constraints.u_min.array() > c.constraints.u_max.array()).any()) {
            err("control.u_min", "u_min exceeds u_max in some component");
        }
    }
    if (c.constraints.mode == ConstraintMode::Ball && !(c.constraints.ball_radius > 0.0)) {
        err("control.ball_radius", "ball radius must be positive");
    }

    try {
        const Matrix pts = target_points(c.target);
        if (output_dim > 0 && pts.rows() != output_dim) {
            err("target", "target samples are " + std::to_string(pts.rows()) +
                              "-dimensional but agent outputs are " + std::to_string(output_dim) + "-dimensional");
        }
        if (!pts.allFinite()) err("target", "target samples must be finite");
    } catch (const std::exception& e) {
        err("target", e.what());
    }
    return rep;
}

}  // namespace

bool ModelSpec::operator==(const ModelSpec& o) const {
    return preset == o.preset && dt == o.dt && axes == o.axes && hover.dt == o.hover.dt &&
           hover.mass == o.hover.mass && hover.gravity == o.hover.gravity &&
           hover.inertia_roll == o.hover.inertia_roll && hover.inertia_pitch == o.hover.inertia_pitch &&
           hover.inertia_yaw == o.hover.inertia_yaw && same(A, o.A) && same(B, o.B) && same(C, o.C) &&
           same(sigma_w, o.sigma_w) && same(sigma_v, o.sigma_v) &&
           expected_relative_degree == o.expected_relative_degree;
}

bool AgentSpec::operator==(const AgentSpec& o) const {
    return same(initial_mean, o.initial_mean) && same(initial_covariance, o.initial_covariance) && model == o.model;
}

bool TargetSpec::operator==(const TargetSpec& o) const {
    return generator == o.generator && same(points, o.points) && count == o.count && same(center, o.center) &&
           radius == o.radius && radial_std == o.radial_std && major_radius == o.major_radius &&
           minor_radius == o.minor_radius && same(lower, o.lower) && same(upper, o.upper) &&
           per_axis == o.per_axis && seed == o.seed;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
    return name == o.name && model == o.model && agents == o.agents && target == o.target &&
           horizon == o.horizon && constraints.mode == o.constraints.mode &&
           same(constraints.u_min, o.constraints.u_min) && same(constraints.u_max, o.constraints.u_max) &&
           constraints.ball_radius == o.constraints.ball_radius && r_scale == o.r_scale &&
           comm_range == o.comm_range && steps == o.steps && mass_steps == o.mass_steps &&
           confidence == o.confidence && selection == o.selection && lambda == o.lambda && knn == o.knn &&
           weight_rule == o.weight_rule && radius_sigma == o.radius_sigma &&
           controller == o.controller && estimator == o.estimator && on_exhaustion == o.on_exhaustion &&
           greedy.kp == o.greedy.kp && greedy.kd == o.greedy.kd && greedy.dt == o.greedy.dt && runs == o.runs &&
           seed == o.seed && w2_stride == o.w2_stride && w2_subsample == o.w2_subsample;
}

std::string ConfigIssue::to_string() const {
    std::string s = field + ": " + message;
    if (line > 0) s += " (line " + std::to_string(line) + ")";
    return s;
}

namespace {
std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::string s = std::to_string(issues.size()) + " configuration error(s)";
    for (const auto& i : issues) s += "\n  " + i.to_string();
    return s;
}
}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ScenarioConfig parse_config(const std::string& text, const std::string& source_name,
                            std::vector<std::string>* warnings) {
    toml::table root;
    try {
        root = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        throw ConfigError({{source_name, std::string(e.description()), static_cast<int>(e.source().begin.line)}});
    }

    Reader rd;
    ScenarioConfig c;
    rd.check_keys(root, "", {"name", "mission", "control", "selection", "communication", "metrics", "baseline",
                             "model", "target", "agents"});
    if (auto v = rd.string(root, "name", "")) c.name = *v;

    if (const toml::table* t = rd.table(root, "mission", "", true, 1)) {
        rd.check_keys(*t, "mission", {"steps", "mass_steps", "runs", "seed", "controller", "estimator", "on_exhaustion"});
        if (auto v = rd.integer(*t, "steps", "mission", true, Reader::line_of(*t))) c.steps = static_cast<int>(*v);
        if (auto v = rd.integer(*t, "mass_steps", "mission")) c.mass_steps = static_cast<int>(*v);
        if (auto v = rd.integer(*t, "runs", "mission")) c.runs = static_cast<int>(*v);
        if (auto v = rd.integer(*t, "seed", "mission")) {
            if (*v < 0) rd.fail("mission.seed", "seed must be nonnegative", rd.lines["mission.seed"]);
            else c.seed = static_cast<std::uint64_t>(*v);
        }
        rd.choice(*t, "controller", "mission", kControllers, c.controller);
        rd.choice(*t, "estimator", "mission", kEstimators, c.estimator);
        rd.choice(*t, "on_exhaustion", "mission", kExhaustion, c.on_exhaustion);
    }
    if (const toml::table* t = rd.table(root, "control", "", false, 1)) {
        rd.check_keys(*t, "control", {"horizon", "r_scale", "constraint", "u_min", "u_max", "ball_radius"});
        if (auto v = rd.integer(*t, "horizon", "control")) c.horizon = static_cast<int>(*v);
        if (auto v = rd.number(*t, "r_scale", "control")) c.r_scale = *v;
        rd.choice(*t, "constraint", "control", kConstraintModes, c.constraints.mode);
        const bool box = c.constraints.mode == ConstraintMode::Box;
        if (auto v = rd.vector(*t, "u_min", "control", box, Reader::line_of(*t))) c.constraints.u_min = *v;
        if (auto v = rd.vector(*t, "u_max", "control", box, Reader::line_of(*t))) c.constraints.u_max = *v;
        if (auto v = rd.number(*t, "ball_radius", "control", c.constraints.mode == ConstraintMode::Ball,
                               Reader::line_of(*t))) {
            c.constraints.ball_radius = *v;
        }
    }
    if (const toml::table* t = rd.table(root, "selection", "", false, 1)) {
        rd.check_keys(*t, "selection", {"mode", "lambda", "knn", "confidence", "weight_update", "radius_sigma"});
        rd.choice(*t, "mode", "selection", kSelectionModes, c.selection);
        if (auto v = rd.number(*t, "lambda", "selection")) c.lambda = *v;
        if (auto v = rd.integer(*t, "knn", "selection")) c.knn = static_cast<int>(*v);
        if (auto v = rd.number(*t, "confidence", "selection")) c.confidence = *v;
        rd.choice(*t, "weight_update", "selection", kWeightRules, c.weight_rule);
        if (auto v = rd.number(*t, "radius_sigma", "selection")) c.radius_sigma = *v;
    }
    if (const toml::table* t = rd.table(root, "communication", "", false, 1)) {
        rd.check_keys(*t, "communication", {"range"});
        if (auto v = rd.number(*t, "range", "communication")) c.comm_range = *v;
    }
    if (const toml::table* t = rd.table(root, "metrics", "", false, 1)) {
        rd.check_keys(*t, "metrics", {"w2_stride", "w2_subsample"});
        if (auto v = rd.integer(*t, "w2_stride", "metrics")) c.w2_stride = static_cast<int>(*v);
        if (auto v = rd.integer(*t, "w2_subsample", "metrics")) c.w2_subsample = static_cast<int>(*v);
    }
    if (const toml::table* t = rd.table(root, "baseline", "", false, 1)) {
        rd.check_keys(*t, "baseline", {"kp", "kd", "dt"});
        if (auto v = rd.number(*t, "kp", "baseline")) c.greedy.kp = *v;
        if (auto v = rd.number(*t, "kd", "baseline")) c.greedy.kd = *v;
        if (auto v = rd.number(*t, "dt", "baseline")) c.greedy.dt = *v;
    }
    if (const toml::table* t = rd.table(root, "model", "", true, 1)) c.model = read_model(rd, *t, "model");

    if (const toml::table* t = rd.table(root, "target", "", true, 1)) {
        rd.check_keys(*t, "target", {"generator", "points", "count", "center", "radius", "radial_std",
                                     "major_radius", "minor_radius", "lower", "upper", "per_axis", "seed"});
        TargetSpec& s = c.target;
        const int line = Reader::line_of(*t);
        rd.choice(*t, "generator", "target", kGenerators, s.generator);
        // One point per row in the file; stored column-wise.
        if (auto m = rd.matrix(*t, "points", "target", s.generator == TargetGenerator::Points, line)) {
            s.points = m->transpose();
        }
        const bool counted = s.generator == TargetGenerator::Ring || s.generator == TargetGenerator::Torus;
        if (auto v = rd.integer(*t, "count", "target", counted, line)) s.count = static_cast<int>(*v);
        if (auto v = rd.vector(*t, "center", "target", counted, line)) s.center = *v;
        if (auto v = rd.number(*t, "radius", "target")) s.radius = *v;
        if (auto v = rd.number(*t, "radial_std", "target")) s.radial_std = *v;
        if (auto v = rd.number(*t, "major_radius", "target")) s.major_radius = *v;
        if (auto v = rd.number(*t, "minor_radius", "target")) s.minor_radius = *v;
        const bool grid = s.generator == TargetGenerator::Grid;
        if (auto v = rd.vector(*t, "lower", "target", grid, line)) s.lower = *v;
        if (auto v = rd.vector(*t, "upper", "target", grid, line)) s.upper = *v;
        if (auto v = rd.integer(*t, "per_axis", "target", grid, line)) s.per_axis = static_cast<int>(*v);
        if (auto v = rd.integer(*t, "seed", "target")) {
            if (*v < 0) rd.fail("target.seed", "seed must be nonnegative", rd.lines["target.seed"]);
            else s.seed = static_cast<std::uint64_t>(*v);
        }
    }

    if (const toml::node* n = rd.find(root, "agents", "", true, 1)) {
        const toml::array* arr = n->as_array();
        if (!arr || !arr->is_array_of_tables()) {
            rd.fail("agents", "expected an array of tables ([[agents]])", Reader::line_of(*n));
        } else {
            for (std::size_t i = 0; i < arr->size(); ++i) {
                const toml::table& t = *arr->get(i)->as_table();
                const std::string path = "agents[" + std::to_string(i) + "]";
                rd.check_keys(t, path, {"initial_mean", "initial_covariance", "model"});
                AgentSpec a;
                if (const toml::table* mt = rd.table(t, "model", path, false, Reader::line_of(t))) {
                    a.model = read_model(rd, *mt, path + ".model");
                }
                const int n_state = state_dim_of(a.model ? *a.model : c.model);
                if (auto v = rd.vector(t, "initial_mean", path, true, Reader::line_of(t))) a.initial_mean = *v;
                if (auto m = rd.matrix(t, "initial_covariance", path, false, Reader::line_of(t), n_state)) {
                    a.initial_covariance = *m;
                }
                c.agents.push_back(std::move(a));
            }
        }
    }

    if (!rd.errors.empty()) throw ConfigError(rd.errors);
    ValidationReport rep = validate_impl(c, &rd.lines);
    if (!rep.ok()) throw ConfigError(rep.errors);
    if (warnings) *warnings = rep.warnings;
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{path.string(), "cannot open config file", 0}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string(), warnings);
}

ValidationReport validate_config(const ScenarioConfig& config) {
    return validate_impl(config, nullptr);
}

std::string serialize_config(const ScenarioConfig& c) {
    toml::table root;
    root.insert("name", c.name);

    toml::table mission{{"steps", static_cast<std::int64_t>(c.steps)},
                        {"runs", static_cast<std::int64_t>(c.runs)},
                        {"seed", static_cast<std::int64_t>(c.seed)},
                        {"controller", name_of(kControllers, c.controller)},
                        {"estimator", name_of(kEstimators, c.estimator)},
                        {"on_exhaustion", name_of(kExhaustion, c.on_exhaustion)}};
    if (c.mass_steps) mission.insert("mass_steps", static_cast<std::int64_t>(*c.mass_steps));
    root.insert("mission", std::move(mission));

    toml::table control{{"horizon", static_cast<std::int64_t>(c.horizon)},
                        {"r_scale", c.r_scale},
                        {"constraint", name_of(kConstraintModes, c.constraints.mode)}};
    if (c.constraints.u_min.size()) control.insert("u_min", write_vector(c.constraints.u_min));
    if (c.constraints.u_max.size()) control.insert("u_max", write_vector(c.constraints.u_max));
    if (c.constraints.mode == ConstraintMode::Ball || c.constraints.ball_radius != 0.0) {
        control.insert("ball_radius", c.constraints.ball_radius);
    }
    root.insert("control", std::move(control));

    root.insert("selection", toml::table{{"mode", name_of(kSelectionModes, c.selection)},
                                         {"lambda", c.lambda},
                                         {"knn", static_cast<std::int64_t>(c.knn)},
                                         {"confidence", c.confidence},
                                         {"weight_update", name_of(kWeightRules, c.weight_rule)},
                                         {"radius_sigma", c.radius_sigma}});
    root.insert("communication", toml::table{{"range", c.comm_range}});
    root.insert("metrics", toml::table{{"w2_stride", static_cast<std::int64_t>(c.w2_stride)},
                                       {"w2_subsample", static_cast<std::int64_t>(c.w2_subsample)}});
    root.insert("baseline", toml::table{{"kp", c.greedy.kp}, {"kd", c.greedy.kd}, {"dt", c.greedy.dt}});
    root.insert("model", write_model(c.model));

    const TargetSpec& s = c.target;
    toml::table target{{"generator", name_of(kGenerators, s.generator)},
                       {"count", static_cast<std::int64_t>(s.count)},
                       {"radius", s.radius},
                       {"radial_std", s.radial_std},
                       {"major_radius", s.major_radius},
                       {"minor_radius", s.minor_radius},
                       {"per_axis", static_cast<std::int64_t>(s.per_axis)},
                       {"seed", static_cast<std::int64_t>(s.seed)}};
    if (s.points.size()) target.insert("points", write_matrix(s.points.transpose()));
    if (s.center.size()) target.insert("center", write_vector(s.center));
    if (s.lower.size()) target.insert("lower", write_vector(s.lower));
    if (s.upper.size()) target.insert("upper", write_vector(s.upper));
    root.insert("target", std::move(target));

    toml::array agents;
    for (const AgentSpec& a : c.agents) {
        toml::table t{{"initial_mean", write_vector(a.initial_mean)}};
        if (a.initial_covariance.size()) t.insert("initial_covariance", write_matrix(a.initial_covariance));
        if (a.model) t.insert("model", write_model(*a.model));
        agents.push_back(std::move(t));
    }
    root.insert("agents", std::move(agents));

    std::ostringstream os;
    os << root << '\n';
    return os.str();
}

AgentModel build_model(const ModelSpec& spec) {
    switch (spec.preset) {
        case ModelPreset::DoubleIntegrator: {
            const AgentModel base = models::double_integrator(spec.axes, spec.dt, 0.0, 0.0);
            return AgentModel(base.A(), base.B(), base.C(), spec.sigma_w, spec.sigma_v);
        }
        case ModelPreset::QuadrotorHover: {
            models::HoverParameters p = spec.hover;
            p.dt = spec.dt;
            const AgentModel base = models::quadrotor_hover(p, 0.0, 0.0);
            return AgentModel(base.A(), base.B(), base.C(), spec.sigma_w, spec.sigma_v);
        }
        case ModelPreset::Explicit:
            return AgentModel(spec.A, spec.B, spec.C, spec.sigma_w, spec.sigma_v);
    }
    throw std::logic_error("unknown model preset");
}

Matrix target_points(const TargetSpec& s) {
    switch (s.generator) {
        case TargetGenerator::Points:
            if (s.points.cols() == 0) throw std::invalid_argument("explicit target needs at least one point");
            return s.points;
        case TargetGenerator::Ring:
            return targets::ring(s.count, s.center, s.radius, s.radial_std, s.seed);
        case TargetGenerator::Grid:
            return targets::grid(s.lower, s.upper, s.per_axis);
        case TargetGenerator::Torus:
            return targets::torus(s.count, s.center, s.major_radius, s.minor_radius, s.seed);
    }
    throw std::logic_error("unknown target generator");
}

std::string to_string(ControllerKind kind) { return name_of(kControllers, kind); }
std::string to_string(ConstraintMode mode) { return name_of(kConstraintModes, mode); }

}  // namespace d2oc
