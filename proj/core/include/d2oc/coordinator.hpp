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
#ifndef D2OC_COORDINATOR_HPP
#define D2OC_COORDINATOR_HPP

#include "d2oc/lti_model.hpp"
#include "d2oc/mpc.hpp"
#include "d2oc/reachability.hpp"
#include "d2oc/transport.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace d2oc {

/// Target samples (d x N) plus each agent's private view of their capacities.
struct SampleField {
    Matrix samples;
    std::vector<Vector> weights;

    /// Every agent starts with capacity 1/N on every sample.
    static SampleField uniform(Matrix samples, int agents);

    int size() const { return static_cast<int>(samples.cols()); }
    int agent_count() const { return static_cast<int>(weights.size()); }
    double remaining(int agent) const { return weights.at(agent).sum(); }
};

enum class SelectionMode { Hard, Soft };

struct SelectionConfig {
    int horizon = 1;
    InputConstraints constraints;
    SelectionMode mode = SelectionMode::Hard;
    double lambda = 1.0;  // soft-constraint weight
    int knn = 25;         // candidate pool size, 0 = all samples
    double mass = 0.0;    // alpha_i, mass delivered per step
};

struct HorizonTarget {
    int h = 0;                         // steps ahead, r .. r + H - 1
    TransportPlan plan;                // greedy plan from the nominal output
    Vector nominal;                    // C A^h mu
    Vector barycenter;                 // plan barycenter q_bar
    Vector adjusted;                   // closest reachable output to the selection
    Vector target;                     // point tracked by the MPC
    double projection_distance = 0.0;  // ||target - barycenter||
    double spread = 0.0;               // sum_j pi_j ||q_j - barycenter||^2
    int soft_iterations = 0;
};

struct TargetSelection {
    std::vector<HorizonTarget> steps;
    bool idle = false;  // capacity exhausted, nothing to track
};

/// Everything Stage 1 may read for one agent; no other agent is reachable from here.
struct AgentContext {
    const AgentModel& model;
    const PredictionMatrices& pred;
    const Vector& mu;
    const Matrix& samples;
    const Vector& weights;
    const SelectionConfig& config;
};

/// Per-step input box used for reachability; Ball mode uses its inscribed box.
std::optional<std::pair<Vector, Vector>> reachability_box(const InputConstraints& c, int input_dim);

TargetSelection select_targets(const AgentContext& ctx);

struct SoftBarycenter {
    Vector barycenter;  // blended q_bar
    Vector reachable;   // q_hat, inside the output zonotope
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  // objective after each iteration
};

/**
 * Penalized selection for a fixed plan of mass `mass` with barycenter
 * `sample_barycenter`:
 *
 *   min  mass ||q - sample_barycenter||^2 + lambda ||q - q_hat||^2,
 *        q_hat in {anchor + G l : |l|_inf <= 1}
 *
 * by alternating closed-form updates of q and projections for q_hat.
 */
SoftBarycenter soft_barycenter(const Vector& sample_barycenter, double mass, const Vector& anchor,
                               const Matrix& generators, double lambda, int max_iterations = 20,
                               double tolerance = 1e-6);

/// select_targets with the soft-constraint rule and the given lambda.
TargetSelection soft_constraint_select(const AgentContext& ctx, double lambda);

/// beta_j <- max(0, beta_j - pi_j); returns the mass removed.
double update_weights(Vector& weights, const TransportPlan& plan);

/// Ablation rule: beta_j <- beta_j (1 - exp(-||y - q_j||^2 / sigma^2)). Returns the removed mass.
double update_weights_radius(Vector& weights, const Matrix& samples, const Vector& y, double sigma);

struct CommGraph {
    std::vector<std::vector<char>> adjacency;
    double range = 0.0;

    int size() const { return static_cast<int>(adjacency.size()); }
    bool connected(int i, int j) const { return adjacency[i][j] != 0; }
    std::vector<std::pair<int, int>> edges() const;  // i < j
    int edge_count() const { return static_cast<int>(edges().size()); }
};

/// Edge iff ||p_i - p_j|| <= range; positions are columns.
CommGraph comm_graph(const Matrix& positions, double range);

/// One synchronous round of elementwise min over closed neighborhoods.
void consensus_exchange(std::vector<Vector>& weights, const CommGraph& graph);

enum class ControllerKind { D2oc, Greedy };
enum class EstimatorKind { Oracle, Kalman };
enum class ExhaustionPolicy { Idle, Reset };

/// Nearest-sample PD tracker used as the contrast baseline.
struct GreedyGains {
    double kp = 4.0;
    double kd = 4.0;
    double dt = 0.1;
};

enum class WeightRule { Transport, Radius };

struct CoordinatorConfig {
    SelectionConfig selection;
    Matrix R;
    double comm_range = 1.0;
    ControllerKind controller = ControllerKind::D2oc;
    EstimatorKind estimator = EstimatorKind::Oracle;
    ExhaustionPolicy on_exhaustion = ExhaustionPolicy::Idle;
    GreedyGains greedy;
    WeightRule weight_rule = WeightRule::Transport;
    double radius_sigma = 0.1;
};

/// Simulation-side agent: model, controller caches, true and estimated state.
struct Agent {
    Agent(AgentModel model, int horizon, Vector x0, Vector mu0, Vector y0, Rng rng, bool kalman);

    AgentModel model;
    QpAssembler assembler;
    std::optional<SteadyStateKalman> kalman;
    std::vector<double> output_noise_trace;  // tr(C Sigma_h C^T + Sigma_v) per horizon step
    Vector x;
    Vector mu;
    Vector y;
    Vector y_prev;
    Rng rng;
};

struct AgentStepRecord {
    Vector u;
    double objective = 0.0;       // QP objective at the applied sequence
    double constant_term = 0.0;   // terms of the expected cost independent of U
    double expected_cost = 0.0;   // direct evaluation of the expected cost
    double projection_distance = 0.0;
    double kkt_residual = 0.0;
    double removed_mass = 0.0;
    bool idle = false;
    bool reset = false;
};

struct CycleEvent {
    int step = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<AgentStepRecord> agents;
};

/**
 * One decentralized cycle: per-agent selection and MPC, noisy transition,
 * weight update at the new output, then one consensus round over the
 * communication graph of the new outputs.
 */
CycleEvent run_cycle(std::vector<Agent>& agents, SampleField& field, const CoordinatorConfig& config,
                     int step);

/// Input of the nearest-sample PD baseline for one agent.
Vector greedy_input(const Agent& agent, const Matrix& samples, const Vector& weights,
                    const CoordinatorConfig& config);

}  // namespace d2oc

#endif  // D2OC_COORDINATOR_HPP
