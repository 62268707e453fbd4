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
#include "d2oc/mpc.hpp"

#include "d2oc/box_qp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace d2oc {

InputConstraints InputConstraints::box(Vector lo, Vector hi) {
    if (lo.size() != hi.size()) throw DimensionError("box bounds differ in length");
    if ((lo.array() > hi.array()).any()) throw std::invalid_argument("input box has u_min > u_max");
    InputConstraints c;
    c.mode = ConstraintMode::Box;
    c.u_min = std::move(lo);
    c.u_max = std::move(hi);
    return c;
}

InputConstraints InputConstraints::ball(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    InputConstraints c;
    c.mode = ConstraintMode::Ball;
    c.ball_radius = radius;
    return c;
}

QpAssembler::QpAssembler(PredictionMatrices pred) : pred_(std::move(pred)) {
    const int H = pred_.horizon;
    const auto d = pred_.theta.rows() / H;
    gram_.reserve(H);
    for (int h = 0; h < H; ++h) {
        const auto block = pred_.theta.middleRows(h * d, d);
        gram_.push_back(block.transpose() * block);
    }
}

QpProblem QpAssembler::build(const OmegaWeights& omega, const Vector& mu, const Vector& Q_bar,
                             const Matrix& R, const InputConstraints& constraints) const {
    const int H = pred_.horizon;
    const auto dH = pred_.theta.rows();
    const auto mH = pred_.theta.cols();
    const auto d = dH / H;
    if (omega.s.size() != H) throw DimensionError("one Omega weight per horizon step is required");
    if ((omega.s.array() < 0.0).any()) throw std::invalid_argument("Omega weights must be nonnegative");
    if (mu.size() != pred_.phi.cols()) throw DimensionError("mean state has wrong dimension");
    if (Q_bar.size() != dH) throw DimensionError("stacked barycenters must have length d H");
    if (R.rows() != mH || R.cols() != mH) throw DimensionError("R must be (m H) x (m H)");
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, R.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("R must be symmetric");
    }
    if (Eigen::LLT<Matrix>(R).info() != Eigen::Success) throw std::invalid_argument("R must be positive definite");

    QpProblem qp;
    qp.horizon = H;
    qp.input_dim = static_cast<int>(mH / H);
    qp.constraints = constraints;
    qp.hessian = R;
    const Vector residual = pred_.phi * mu - Q_bar;
    qp.f = Vector::Zero(mH);
    for (int h = 0; h < H; ++h) {
        const double w = omega.s(h) * omega.s(h);
        if (w == 0.0) continue;
        const auto rows = pred_.theta.middleRows(h * d, d);
        const auto res = residual.segment(h * d, d);
        qp.hessian += w * gram_[h];
        qp.f += w * (rows.transpose() * res);
        qp.offset += w * res.squaredNorm();
    }
    qp.hessian = 0.5 * (qp.hessian + qp.hessian.transpose());
    return qp;
}

QpProblem build_qp(const PredictionMatrices& pred, const OmegaWeights& omega, const Vector& mu,
                   const Vector& Q_bar, const Matrix& R, const InputConstraints& constraints) {
    return QpAssembler(pred).build(omega, mu, Q_bar, R, constraints);
}

ControlSolution solve_unconstrained(const QpProblem& qp) {
    Eigen::LLT<Matrix> llt(qp.hessian);
    if (llt.info() != Eigen::Success) throw std::runtime_error("QP Hessian is not positive definite");
    ControlSolution sol;
    sol.U = -llt.solve(qp.f);
    sol.kkt_residual = (qp.hessian * sol.U + qp.f).lpNorm<Eigen::Infinity>();
    sol.objective = sol.U.dot(qp.hessian * sol.U) + 2.0 * qp.f.dot(sol.U);
    sol.lambda_upper = Vector::Zero(sol.U.size());
    sol.lambda_lower = Vector::Zero(sol.U.size());
    return sol;
}

ControlSolution solve_box_qp(const QpProblem& qp) {
    if (qp.constraints.mode != ConstraintMode::Box) throw std::invalid_argument("QP has no box constraints");
    const int m = qp.input_dim;
    if (qp.constraints.u_min.size() != m || qp.constraints.u_max.size() != m) {
        throw DimensionError("box bounds must have one entry per input");
    }
    const Vector lower = qp.constraints.u_min.replicate(qp.horizon, 1);
    const Vector upper = qp.constraints.u_max.replicate(qp.horizon, 1);
    const BoxQpResult r = solve_box_qp(qp.hessian, qp.f, lower, upper);
    ControlSolution sol;
    sol.U = r.x;
    sol.kkt_residual = r.kkt_residual;
    sol.active_bounds = r.active;
    sol.lambda_upper = r.lambda_upper;
    sol.lambda_lower = r.lambda_lower;
    sol.objective = r.objective;
    sol.used_fallback = r.used_fallback;
    return sol;
}

Vector project_ball_per_step(const Vector& U, int input_dim, double u_max_norm) {
    if (!(u_max_norm > 0.0)) throw std::invalid_argument("ball radius must be positive");
    if (input_dim < 1 || U.size() % input_dim != 0) throw DimensionError("stack length is not a multiple of m");
    Vector out = U;
    for (Eigen::Index s = 0; s < U.size(); s += input_dim) {
        const double norm = U.segment(s, input_dim).norm();
        if (norm > u_max_norm) out.segment(s, input_dim) *= u_max_norm / norm;
    }
    return out;
}

ControlSolution solve_qp(const QpProblem& qp) {
    switch (qp.constraints.mode) {
        case ConstraintMode::None:
            return solve_unconstrained(qp);
        case ConstraintMode::Box:
            return solve_box_qp(qp);
        case ConstraintMode::Ball: {
            ControlSolution sol = solve_unconstrained(qp);
            sol.U = project_ball_per_step(sol.U, qp.input_dim, qp.constraints.ball_radius);
            sol.objective = sol.U.dot(qp.hessian * sol.U) + 2.0 * qp.f.dot(sol.U);
            // kkt_residual stays that of the unconstrained solve being projected.
            return sol;
        }
    }
    throw std::logic_error("unknown constraint mode");
}

Vector mpc_step(const QpAssembler& assembler, const OmegaWeights& omega, const Vector& mu,
                const Vector& Q_bar, const Matrix& R, const InputConstraints& constraints,
                ControlSolution* solution) {
    const QpProblem qp = assembler.build(omega, mu, Q_bar, R, constraints);
    ControlSolution sol = solve_qp(qp);
    Vector u = sol.U.head(qp.input_dim);
    if (solution) *solution = std::move(sol);
    return u;
}

Matrix default_input_weight(int input_dim, int horizon, double scale) {
    return scale * Matrix::Identity(static_cast<Eigen::Index>(input_dim) * horizon,
                                    static_cast<Eigen::Index>(input_dim) * horizon);
}

}  // namespace d2oc
