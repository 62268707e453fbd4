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
#include "d2oc/box_qp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace d2oc {

namespace {

enum class Bound : char { Free = 'f', Lower = 'l', Upper = 'u' };

double objective_value(const Matrix& H, const Vector& f, const Vector& x) {
    return x.dot(H * x) + 2.0 * f.dot(x);
}

Vector clamp(const Vector& x, const Vector& lower, const Vector& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

bool near(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

// Accelerated projected gradient with function-value restart.
Vector projected_gradient(const Matrix& H, const Vector& f, const Vector& lower,
                          const Vector& upper, Vector x, double tol, int max_iter, int& iters) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
    const double L = 2.0 * std::max(0.0, eig.eigenvalues().maxCoeff());
    if (L == 0.0) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (f(i) > 0.0) x(i) = lower(i);
            else if (f(i) < 0.0) x(i) = upper(i);
        }
        return clamp(x, lower, upper);
    }
    Vector y = x;
    double t = 1.0;
    double prev_obj = objective_value(H, f, x);
    for (iters = 0; iters < max_iter; ++iters) {
        const Vector grad = 2.0 * (H * y + f);
        const Vector next = clamp(y - grad / L, lower, upper);
        const double obj = objective_value(H, f, next);
        if (obj > prev_obj) {
            t = 1.0;
            y = x;
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = next + ((t - 1.0) / t_next) * (next - x);
        x = next;
        t = t_next;
        prev_obj = obj;
        if (iters % 16 == 0 && box_kkt_residual(H, f, lower, upper, x) <= tol) break;
    }
    return x;
}

}  // namespace

double box_kkt_residual(const Matrix& H, const Vector& f, const Vector& lower, const Vector& upper,
                        const Vector& x, Vector* lambda_upper, Vector* lambda_lower) {
    const Vector g = H * x + f;
    Vector lu = Vector::Zero(x.size());
    Vector ll = Vector::Zero(x.size());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const bool at_upper = std::isfinite(upper(i)) && (x(i) >= upper(i) || near(x(i), upper(i)));
        const bool at_lower = std::isfinite(lower(i)) && (x(i) <= lower(i) || near(x(i), lower(i)));
        double r = g(i);
        if (at_upper) lu(i) = std::max(0.0, -g(i));
        if (at_lower) ll(i) = std::max(0.0, g(i));
        r += lu(i) - ll(i);
        worst = std::max(worst, std::abs(r));
    }
    if (lambda_upper) *lambda_upper = lu;
    if (lambda_lower) *lambda_lower = ll;
    return worst;
}

BoxQpResult solve_box_qp(const Matrix& H, const Vector& f, const Vector& lower,
                         const Vector& upper, const BoxQpOptions& options) {
    const Eigen::Index n = f.size();
    if (H.rows() != n || H.cols() != n) throw DimensionError("QP Hessian must be n x n");
    if (lower.size() != n || upper.size() != n) throw DimensionError("QP bounds must have length n");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(lower(i) <= upper(i))) throw std::invalid_argument("QP box is empty (lower > upper)");
    }

    const double scale = std::max({1.0, H.cwiseAbs().maxCoeff(), f.cwiseAbs().maxCoeff()});
    const double tol = options.tolerance * scale;
    const int cap = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * n + 20);

    BoxQpResult result;
    Vector x = clamp(Vector::Zero(n), lower, upper);
    std::vector<Bound> state(n, Bound::Free);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (x(i) == lower(i)) state[i] = Bound::Lower;
        else if (x(i) == upper(i)) state[i] = Bound::Upper;
    }

    std::set<std::string> seen;
    bool converged = false;
    int it = 0;
    for (; it < cap; ++it) {
        std::vector<int> F;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state[i] == Bound::Free) F.push_back(static_cast<int>(i));
        }
        const Vector g = H * x + f;

        if (!F.empty()) {
            const auto nf = static_cast<Eigen::Index>(F.size());
            Matrix HFF(nf, nf);
            Vector gF(nf);
            for (Eigen::Index a = 0; a < nf; ++a) {
                gF(a) = g(F[a]);
                for (Eigen::Index b = 0; b < nf; ++b) HFF(a, b) = H(F[a], F[b]);
            }
            Eigen::CompleteOrthogonalDecomposition<Matrix> cod(HFF);
            cod.setThreshold(1e-12);
            Vector p = -cod.solve(gF);
            const Vector resid = gF + HFF * p;
            bool unbounded_ray = false;
            if (resid.lpNorm<Eigen::Infinity>() > 1e-11 * scale * (1.0 + p.lpNorm<Eigen::Infinity>())) {
                // Gradient has a component in the null space of HFF: zero
                // curvature descent ray, follow it to the first bound.
                p = -resid;
                unbounded_ray = true;
            }
            if (p.lpNorm<Eigen::Infinity>() > 0.0) {
                double step = unbounded_ray ? std::numeric_limits<double>::infinity() : 1.0;
                Eigen::Index blocking = -1;
                Bound blocking_side = Bound::Free;
                for (Eigen::Index a = 0; a < nf; ++a) {
                    const int i = F[a];
                    double limit = std::numeric_limits<double>::infinity();
                    Bound side = Bound::Free;
                    if (p(a) > 0.0 && std::isfinite(upper(i))) {
                        limit = (upper(i) - x(i)) / p(a);
                        side = Bound::Upper;
                    } else if (p(a) < 0.0 && std::isfinite(lower(i))) {
                        limit = (lower(i) - x(i)) / p(a);
                        side = Bound::Lower;
                    }
                    if (limit < step) {
                        step = std::max(0.0, limit);
                        blocking = i;
                        blocking_side = side;
                    }
                }
                if (!std::isfinite(step)) throw std::runtime_error("box QP is unbounded below");
                for (Eigen::Index a = 0; a < nf; ++a) x(F[a]) += step * p(a);
                if (blocking >= 0) {
                    state[blocking] = blocking_side;
                    x(blocking) = blocking_side == Bound::Upper ? upper(blocking) : lower(blocking);
                    x = clamp(x, lower, upper);
                    continue;
                }
                x = clamp(x, lower, upper);
            }
        }

        // Subspace minimizer: inspect multipliers of the working set.
        const Vector g_new = H * x + f;
        double worst = tol;
        Eigen::Index release = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state[i] == Bound::Free || lower(i) == upper(i)) continue;
            const double violation = state[i] == Bound::Lower ? -g_new(i) : g_new(i);
            if (violation > worst) {
                worst = violation;
                release = i;
            }
        }
        if (release < 0) {
            converged = true;
            break;
        }
        std::string signature(state.size(), 'f');
        for (Eigen::Index i = 0; i < n; ++i) signature[i] = static_cast<char>(state[i]);
        if (!seen.insert(signature).second) break;
        state[release] = Bound::Free;
    }
    result.iterations = it;

    if (!converged || box_kkt_residual(H, f, lower, upper, x) > tol) {
        int extra = 0;
        x = projected_gradient(H, f, lower, upper, x, tol, options.fallback_iterations, extra);
        result.iterations += extra;
        result.used_fallback = true;
    }

    result.x = x;
    result.kkt_residual = box_kkt_residual(H, f, lower, upper, x, &result.lambda_upper, &result.lambda_lower);
    result.objective = objective_value(H, f, x);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (near(x(i), lower(i)) || near(x(i), upper(i))) result.active.push_back(static_cast<int>(i));
    }
    return result;
}

}  // namespace d2oc
