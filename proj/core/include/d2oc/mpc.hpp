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
#ifndef D2OC_MPC_HPP
#define D2OC_MPC_HPP

#include "d2oc/lti_model.hpp"

#include <vector>

namespace d2oc {

enum class ConstraintMode { None, Box, Ball };

struct InputConstraints {
    ConstraintMode mode = ConstraintMode::None;
    Vector u_min;  // per step, Box mode
    Vector u_max;
    double ball_radius = 0.0;  // per-step Euclidean bound, Ball mode

    static InputConstraints none() { return {}; }
    static InputConstraints box(Vector lo, Vector hi);
    static InputConstraints ball(double radius);

    bool operator==(const InputConstraints&) const = default;
};

/// Per-horizon-step weights s_h = sqrt(sum_j pi_j); Omega = blkdiag(s_h I_d).
struct OmegaWeights {
    Vector s;
};

/**
 * min_U  U^T hessian U + 2 f^T U  (+ offset)
 *
 * with hessian = (Omega Theta)^T (Omega Theta) + R and
 * f = (Omega Theta)^T Omega (Phi mu - Q_bar). offset = ||Omega (Phi mu - Q_bar)||^2
 * completes the square so that the sum equals
 * ||Omega (Theta U + Phi mu - Q_bar)||^2 + U^T R U.
 */
struct QpProblem {
    Matrix hessian;
    Vector f;
    double offset = 0.0;
    InputConstraints constraints;
    int horizon = 0;
    int input_dim = 0;
};

struct ControlSolution {
    Vector U;
    double kkt_residual = 0.0;
    std::vector<int> active_bounds;
    Vector lambda_upper;
    Vector lambda_lower;
    double objective = 0.0;  // U^T hessian U + 2 f^T U
    bool used_fallback = false;
};

/**
 * Builds QpProblems for one agent. The Gram blocks Theta_h^T Theta_h of
 * each output row block are computed once, so each step only rescales them
 * by the current Omega weights.
 */
class QpAssembler {
public:
    explicit QpAssembler(PredictionMatrices pred);

    const PredictionMatrices& prediction() const { return pred_; }

    QpProblem build(const OmegaWeights& omega, const Vector& mu, const Vector& Q_bar,
                    const Matrix& R, const InputConstraints& constraints) const;

private:
    PredictionMatrices pred_;
    std::vector<Matrix> gram_;
};

QpProblem build_qp(const PredictionMatrices& pred, const OmegaWeights& omega, const Vector& mu,
                   const Vector& Q_bar, const Matrix& R, const InputConstraints& constraints);

/// U = -hessian^{-1} f by Cholesky; ignores any constraints.
ControlSolution solve_unconstrained(const QpProblem& qp);

ControlSolution solve_box_qp(const QpProblem& qp);

/// Scales each m-block of U onto the ball of radius u_max_norm.
Vector project_ball_per_step(const Vector& U, int input_dim, double u_max_norm);

/// Dispatches on qp.constraints.mode. Ball mode projects the unconstrained solution.
ControlSolution solve_qp(const QpProblem& qp);

/// Receding-horizon step: the first m-block of the optimal sequence.
Vector mpc_step(const QpAssembler& assembler, const OmegaWeights& omega, const Vector& mu,
                const Vector& Q_bar, const Matrix& R, const InputConstraints& constraints,
                ControlSolution* solution = nullptr);

/// Default input weight 0.01 I.
Matrix default_input_weight(int input_dim, int horizon, double scale = 0.01);

}  // namespace d2oc

#endif  // D2OC_MPC_HPP
