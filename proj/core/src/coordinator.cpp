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

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace d2oc {

namespace {

bool has_capacity(const Vector& weights, double mass) {
    return weights.sum() >= mass * (1.0 - 1e-9);
}

}  // namespace

SampleField SampleField::uniform(Matrix samples, int agents) {
    if (samples.cols() == 0) throw std::invalid_argument("sample field is empty");
    if (agents < 1) throw std::invalid_argument("sample field needs at least one agent");
    SampleField field;
    const auto N = samples.cols();
    field.samples = std::move(samples);
    field.weights.assign(agents, Vector::Constant(N, 1.0 / static_cast<double>(N)));
    return field;
}

std::optional<std::pair<Vector, Vector>> reachability_box(const InputConstraints& c, int input_dim) {
    switch (c.mode) {
        case ConstraintMode::Box:
            return std::make_pair(c.u_min, c.u_max);
        case ConstraintMode::Ball: {
            const double half = c.ball_radius / std::sqrt(static_cast<double>(input_dim));
            return std::make_pair(Vector::Constant(input_dim, -half).eval(),
                                  Vector::Constant(input_dim, half).eval());
        }
        case ConstraintMode::None:
            break;
    }
    return std::nullopt;
}

SoftBarycenter soft_barycenter(const Vector& sample_barycenter, double mass, const Vector& anchor,
                               const Matrix& generators, double lambda, int max_iterations,
                               double tolerance) {
    if (!(lambda > 0.0)) throw std::invalid_argument("soft-constraint weight must be positive");
    if (!(mass > 0.0)) throw std::invalid_argument("soft selection needs positive mass");
    auto objective = [&](const Vector& q, const Vector& q_hat) {
        return mass * (q - sample_barycenter).squaredNorm() + lambda * (q - q_hat).squaredNorm();
    };

    SoftBarycenter out;
    Vector q = sample_barycenter;
    double previous = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        const Vector q_hat = project_onto_zonotope(anchor, generators, q).point;
        q = (mass * sample_barycenter + lambda * q_hat) / (mass + lambda);
        const double value = objective(q, q_hat);
        out.history.push_back(value);
        out.barycenter = q;
        out.reachable = q_hat;
        out.objective = value;
        out.iterations = it + 1;
        if (value == 0.0 || (it > 0 && std::abs(previous - value) <= tolerance * previous)) {
            out.converged = true;
            return out;
        }
        previous = value;
    }
    // Slow contraction when lambda >> mass: jump to the joint minimizer, whose
    // reachable part is the hard projection of the sample barycenter.
    const Vector q_hat = project_onto_zonotope(anchor, generators, sample_barycenter).point;
    const Vector blended = (mass * sample_barycenter + lambda * q_hat) / (mass + lambda);
    const double value = objective(blended, q_hat);
    if (value <= out.objective) {
        out.barycenter = blended;
        out.reachable = q_hat;
        out.objective = value;
        out.history.push_back(value);
    }
    return out;
}

TargetSelection select_targets(const AgentContext& ctx) {
    const SelectionConfig& cfg = ctx.config;
    const AgentModel& model = ctx.model;
    const int H = ctx.pred.horizon;
    const int r = ctx.pred.r;
    if (cfg.horizon != H) throw std::invalid_argument("selection horizon differs from the prediction horizon");
    if (!(cfg.mass > 0.0)) throw std::invalid_argument("per-step agent mass must be positive");
    if (ctx.samples.rows() != model.output_dim()) throw DimensionError("samples must live in output space");

    TargetSelection sel;
    sel.steps.resize(H);
    sel.idle = !has_capacity(ctx.weights, cfg.mass);
    const auto box = reachability_box(cfg.constraints, model.input_dim());

    Vector nominal_state = ctx.mu;
    for (int i = 0; i < r; ++i) nominal_state = model.A() * nominal_state;
    for (int hh = 0; hh < H; ++hh) {
        HorizonTarget& t = sel.steps[hh];
        t.h = r + hh;
        if (hh > 0) nominal_state = model.A() * nominal_state;
        t.nominal = model.C() * nominal_state;
        if (sel.idle) {
            t.barycenter = t.adjusted = t.target = t.nominal;
            continue;
        }
        t.plan = local_transport_plan(t.nominal, ctx.samples, ctx.weights, cfg.mass, cfg.knn);
        t.barycenter = weighted_barycenter(t.plan, ctx.samples);
        t.spread = plan_spread(t.plan, ctx.samples, t.barycenter);
        if (!box) {
            t.adjusted = t.target = t.barycenter;
            continue;
        }
        const MeanReachableSet set = mean_reachable_set(model, ctx.mu, t.h, box->first, box->second);
        const Vector anchor = model.C() * set.anchor();
        const Matrix gens = model.C() * set.generators;
        if (cfg.mode == SelectionMode::Hard) {
            const ZonotopeProjection proj = project_onto_zonotope(anchor, gens, t.barycenter);
            t.adjusted = t.target = proj.point;
        } else {
            const SoftBarycenter soft = soft_barycenter(t.barycenter, cfg.mass, anchor, gens, cfg.lambda);
            t.adjusted = soft.reachable;
            t.target = soft.barycenter;
            t.soft_iterations = soft.iterations;
        }
        t.projection_distance = (t.target - t.barycenter).norm();
    }
    return sel;
}

TargetSelection soft_constraint_select(const AgentContext& ctx, double lambda) {
    SelectionConfig cfg = ctx.config;
    cfg.mode = SelectionMode::Soft;
    cfg.lambda = lambda;
    const AgentContext soft{ctx.model, ctx.pred, ctx.mu, ctx.samples, ctx.weights, cfg};
    return select_targets(soft);
}

double update_weights(Vector& weights, const TransportPlan& plan) {
    double removed = 0.0;
    for (const auto& e : plan.entries) {
        const double before = weights(e.target);
        weights(e.target) = std::max(0.0, before - e.mass);
        removed += before - weights(e.target);
    }
    return removed;
}

double update_weights_radius(Vector& weights, const Matrix& samples, const Vector& y, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("radius_sigma must be positive");
    double removed = 0.0;
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
        const double before = weights(j);
        if (before <= 0.0) continue;
        const double d2 = (samples.col(j) - y).squaredNorm();
        weights(j) = before * -std::expm1(-d2 / (sigma * sigma));
        removed += before - weights(j);
    }
    return removed;
}

std::vector<std::pair<int, int>> CommGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < size(); ++i) {
        for (int j = i + 1; j < size(); ++j) {
            if (adjacency[i][j]) out.emplace_back(i, j);
        }
    }
    return out;
}

CommGraph comm_graph(const Matrix& positions, double range) {
    if (!(range > 0.0)) throw std::invalid_argument("communication range must be positive");
    const int n = static_cast<int>(positions.cols());
    CommGraph g;
    g.range = range;
    g.adjacency.assign(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const char linked = (positions.col(i) - positions.col(j)).norm() <= range ? 1 : 0;
            g.adjacency[i][j] = g.adjacency[j][i] = linked;
        }
    }
    return g;
}

void consensus_exchange(std::vector<Vector>& weights, const CommGraph& graph) {
    if (static_cast<int>(weights.size()) != graph.size()) {
        throw DimensionError("one weight vector per graph node is required");
    }
    for (const auto& w : weights) {
        if (w.size() != weights.front().size()) throw DimensionError("weight vectors differ in length");
    }
    const std::vector<Vector> before = weights;
    for (int i = 0; i < graph.size(); ++i) {
        for (int j = 0; j < graph.size(); ++j) {
            if (j != i && graph.connected(i, j)) weights[i] = weights[i].cwiseMin(before[j]);
        }
    }
}

Agent::Agent(AgentModel model_, int horizon, Vector x0, Vector mu0, Vector y0, Rng rng_, bool use_kalman)
    : model(std::move(model_)),
      assembler(build_prediction_matrices(model, horizon)),
      x(std::move(x0)),
      mu(std::move(mu0)),
      y(std::move(y0)),
      y_prev(y),
      rng(rng_) {
    if (use_kalman) kalman.emplace(model);
    const int r = assembler.prediction().r;
    for (int hh = 0; hh < horizon; ++hh) {
        const Matrix cov = model.C() * noise_covariance_h(model, r + hh) * model.C().transpose() + model.sigma_v();
        output_noise_trace.push_back(cov.trace());
    }
}

Vector greedy_input(const Agent& agent, const Matrix& samples, const Vector& weights,
                    const CoordinatorConfig& config) {
    const AgentModel& model = agent.model;
    Vector goal = agent.y;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
        if (weights(j) <= 0.0) continue;
        const double d = (samples.col(j) - agent.y).squaredNorm();
        if (d < best) {
            best = d;
            goal = samples.col(j);
        }
    }
    const GreedyGains& g = config.greedy;
    const Vector velocity = (agent.y - agent.y_prev) / g.dt;
    const Vector accel = g.kp * (goal - agent.y) - g.kd * velocity;
    const PredictionMatrices& pred = agent.assembler.prediction();
    const auto d = model.output_dim();
    const Matrix markov = pred.theta.topLeftCorner(d, model.input_dim());  // C A^{r-1} B
    Vector u = markov.completeOrthogonalDecomposition().solve((g.dt * g.dt * accel).eval());

    const InputConstraints& c = config.selection.constraints;
    if (c.mode == ConstraintMode::Box) u = u.cwiseMax(c.u_min).cwiseMin(c.u_max);
    if (c.mode == ConstraintMode::Ball) u = project_ball_per_step(u, model.input_dim(), c.ball_radius);
    return u;
}

CycleEvent run_cycle(std::vector<Agent>& agents, SampleField& field, const CoordinatorConfig& config,
                     int step) {
    const int na = static_cast<int>(agents.size());
    if (field.agent_count() != na) throw DimensionError("sample field has a different agent count");
    const double alpha = config.selection.mass;
    const int N = field.size();

    CycleEvent event;
    event.step = step;
    event.agents.resize(na);
    std::vector<Vector> inputs(na);

    // Stage 1: local selection and control, no communication.
    for (int i = 0; i < na; ++i) {
        Agent& a = agents[i];
        Vector& w = field.weights[i];
        AgentStepRecord& rec = event.agents[i];
        if (config.on_exhaustion == ExhaustionPolicy::Reset && !has_capacity(w, alpha)) {
            w.setConstant(1.0 / static_cast<double>(N));
            rec.reset = true;
        }
        rec.idle = !has_capacity(w, alpha);

        if (config.controller == ControllerKind::Greedy) {
            inputs[i] = greedy_input(a, field.samples, w, config);
            rec.u = inputs[i];
            continue;
        }

        const PredictionMatrices& pred = a.assembler.prediction();
        const AgentContext ctx{a.model, pred, a.mu, field.samples, w, config.selection};
        const TargetSelection sel = select_targets(ctx);
        const int H = pred.horizon;
        const int d = a.model.output_dim();
        OmegaWeights omega{Vector::Zero(H)};
        Vector Q_bar(d * H);
        for (int hh = 0; hh < H; ++hh) {
            const HorizonTarget& t = sel.steps[hh];
            omega.s(hh) = std::sqrt(t.plan.total_mass());
            Q_bar.segment(hh * d, d) = t.target;
        }
        const QpProblem qp = a.assembler.build(omega, a.mu, Q_bar, config.R, config.selection.constraints);
        const ControlSolution sol = solve_qp(qp);
        inputs[i] = sol.U.head(qp.input_dim);

        rec.u = inputs[i];
        rec.objective = sol.objective;
        rec.kkt_residual = sol.kkt_residual;
        rec.constant_term = qp.offset;
        const Vector y_hat = pred.theta * sol.U + pred.phi * a.mu;
        double direct = sol.U.dot(config.R * sol.U);
        double proj = 0.0;
        for (int hh = 0; hh < H; ++hh) {
            const HorizonTarget& t = sel.steps[hh];
            const double w_h = omega.s(hh) * omega.s(hh);
            rec.constant_term += t.spread + w_h * a.output_noise_trace[hh];
            // Samples are shifted with their barycenter onto the tracked target.
            const Vector shift = t.target - t.barycenter;
            for (const auto& e : t.plan.entries) {
                const Vector q = field.samples.col(e.target) + shift;
                direct += e.mass * ((y_hat.segment(hh * d, d) - q).squaredNorm() + a.output_noise_trace[hh]);
            }
            proj += t.projection_distance;
        }
        rec.expected_cost = direct;
        rec.projection_distance = proj / H;
    }

    // Apply inputs.
    for (int i = 0; i < na; ++i) {
        Agent& a = agents[i];
        StepOutcome out = simulate_step(a.model, a.x, inputs[i], a.rng);
        a.y_prev = a.y;
        a.x = std::move(out.x_next);
        a.y = std::move(out.y);
        a.mu = a.kalman ? a.kalman->update(a.model, a.mu, inputs[i], a.y) : a.x;
    }

    // Stage 2: subtract the mass delivered at the new output.
    for (int i = 0; i < na; ++i) {
        Vector& w = field.weights[i];
        if (!has_capacity(w, alpha)) continue;
        if (config.weight_rule == WeightRule::Radius) {
            event.agents[i].removed_mass = update_weights_radius(w, field.samples, agents[i].y, config.radius_sigma);
            continue;
        }
        const TransportPlan plan = local_transport_plan(agents[i].y, field.samples, w, alpha,
                                                        config.selection.knn);
        event.agents[i].removed_mass = update_weights(w, plan);
    }

    // Stage 3: one min-consensus round over the current graph.
    Matrix positions(agents.front().y.size(), na);
    for (int i = 0; i < na; ++i) positions.col(i) = agents[i].y;
    const CommGraph graph = comm_graph(positions, config.comm_range);
    consensus_exchange(field.weights, graph);
    event.edges = graph.edges();
    return event;
}

}  // namespace d2oc
