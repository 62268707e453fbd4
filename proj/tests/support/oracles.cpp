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
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oracle {

namespace {

// Calls f on every k-subset of {0..n-1}.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

double transport_vertex_enumeration(const Vector& supply, const Vector& demand, const Matrix& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    if (m * n > 16) throw std::invalid_argument("vertex enumeration limited to 4 x 4");
    const int vars = m * n;
    Matrix Aeq = Matrix::Zero(m + n, vars);
    Vector b(m + n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            Aeq(i, i * n + j) = 1.0;
            Aeq(m + j, i * n + j) = 1.0;
        }
    }
    b << supply, demand;

    double best = std::numeric_limits<double>::infinity();
    const int basis = std::min(vars, m + n - 1);
    for_each_subset(vars, basis, [&](const std::vector<int>& cols) {
        Matrix sub(m + n, basis);
        for (int c = 0; c < basis; ++c) sub.col(c) = Aeq.col(cols[c]);
        Eigen::ColPivHouseholderQR<Matrix> qr(sub);
        if (qr.rank() < basis) return;
        const Vector x = qr.solve(b);
        if ((sub * x - b).norm() > 1e-10) return;
        if (x.minCoeff() < -1e-12) return;
        double c = 0.0;
        for (int k = 0; k < basis; ++k) c += x(k) * cost(cols[k] / n, cols[k] % n);
        best = std::min(best, c);
    });
    return best;
}

double single_source_enumeration(const Vector& d2, const Vector& capacity, double mass) {
    const int n = static_cast<int>(d2.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double left = mass;
        double c = 0.0;
        for (int j : order) {
            const double take = std::min(left, capacity(j));
            c += take * d2(j);
            left -= take;
        }
        if (left <= 1e-12) best = std::min(best, c);
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

bool lp_feasible(const Matrix& A_in, const Vector& b_in, double tol) {
    // Phase 1: min sum(a) s.t. A x + a = b, x, a >= 0, with b >= 0.
    const int rows = static_cast<int>(A_in.rows());
    const int cols = static_cast<int>(A_in.cols());
    Matrix A = A_in;
    Vector b = b_in;
    for (int i = 0; i < rows; ++i) {
        if (b(i) < 0) {
            A.row(i) *= -1.0;
            b(i) *= -1.0;
        }
    }
    const int total = cols + rows;
    Matrix T = Matrix::Zero(rows, total + 1);
    T.leftCols(cols) = A;
    T.block(0, cols, rows, rows) = Matrix::Identity(rows, rows);
    T.col(total) = b;
    std::vector<int> basis(rows);
    for (int i = 0; i < rows; ++i) basis[i] = cols + i;
    Vector obj = Vector::Zero(total + 1);  // reduced costs, last entry = -objective
    for (int i = 0; i < rows; ++i) obj -= T.row(i).transpose();
    for (int i = 0; i < rows; ++i) obj(cols + i) = 0.0;

    const double eps = 1e-12;
    for (int iter = 0; iter < 100000; ++iter) {
        int enter = -1;
        for (int j = 0; j < total; ++j) {
            if (obj(j) < -eps) {
                enter = j;  // Bland: smallest index
                break;
            }
        }
        if (enter < 0) break;
        int leave = -1;
        double ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < rows; ++i) {
            if (T(i, enter) > eps) {
                const double r = T(i, total) / T(i, enter);
                if (r < ratio - 1e-15 || (std::abs(r - ratio) <= 1e-15 && basis[i] < basis[leave])) {
                    ratio = r;
                    leave = i;
                }
            }
        }
        if (leave < 0) break;  // unbounded in phase 1 cannot happen
        T.row(leave) /= T(leave, enter);
        for (int i = 0; i < rows; ++i) {
            if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
        }
        obj -= obj(enter) * T.row(leave).transpose();
        basis[leave] = enter;
    }
    double infeasibility = 0.0;
    for (int i = 0; i < rows; ++i) {
        if (basis[i] >= cols) infeasibility += T(i, total);
    }
    return infeasibility <= tol * std::max(1.0, b.lpNorm<1>());
}

bool zonotope_contains_lp(const Vector& center, const Matrix& G, const Vector& point, double tol) {
    // l = mu - 1 with 0 <= mu <= 2:  G mu = p - c + G 1,  mu + s = 2.
    const int d = static_cast<int>(G.rows());
    const int g = static_cast<int>(G.cols());
    Matrix A = Matrix::Zero(d + g, 2 * g);
    A.topLeftCorner(d, g) = G;
    A.bottomLeftCorner(g, g) = Matrix::Identity(g, g);
    A.bottomRightCorner(g, g) = Matrix::Identity(g, g);
    Vector b(d + g);
    b.head(d) = point - center + G * Vector::Ones(g);
    b.tail(g) = Vector::Constant(g, 2.0);
    return lp_feasible(A, b, tol);
}

double zonotope_distance_grid(const Vector& center, const Matrix& G, const Vector& point, double step) {
    const int g = static_cast<int>(G.cols());
    const int ticks = static_cast<int>(std::lround(2.0 / step));
    std::vector<int> k(g, 0);
    double best = std::numeric_limits<double>::infinity();
    Vector lambda(g);
    while (true) {
        for (int i = 0; i < g; ++i) lambda(i) = -1.0 + 2.0 * k[i] / ticks;
        best = std::min(best, (center + G * lambda - point).squaredNorm());
        int i = 0;
        while (i < g && ++k[i] > ticks) k[i++] = 0;
        if (i == g) break;
    }
    return std::sqrt(best);
}

Vector projected_gradient(const Matrix& P, const Vector& q, const Vector& lo, const Vector& hi, long iterations) {
    using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 16, 16>;
    using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 16, 1>;
    if (P.rows() > 16) throw std::invalid_argument("projected_gradient oracle limited to n <= 16");
    const Small Ps = P;
    const SmallVec qs = q;
    const SmallVec los = lo;
    const SmallVec his = hi;
    const double L = Eigen::SelfAdjointEigenSolver<Matrix>(P).eigenvalues().maxCoeff();
    const double step = 1.0 / L;
    SmallVec x = SmallVec::Zero(P.rows()).cwiseMax(los).cwiseMin(his);
    SmallVec next(P.rows());
    for (long it = 0; it < iterations; ++it) {
        next = (x - step * (Ps * x + qs)).cwiseMax(los).cwiseMin(his);
        if (next == x) break;
        x = next;
    }
    return x;
}

namespace {

double chi2_density_sub(int k, double t) {
    // Density of chi^2_k at x = t^2 times dx/dt = 2t.
    if (t == 0.0) return k == 1 ? 2.0 / std::sqrt(2.0 * M_PI) : 0.0;
    const double x = t * t;
    const double log_norm = -0.5 * k * std::log(2.0) - std::lgamma(0.5 * k);
    return 2.0 * t * std::exp(log_norm + (0.5 * k - 1.0) * std::log(x) - 0.5 * x);
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double chi2_cdf_simpson(int k, double x) {
    if (x <= 0.0) return 0.0;
    const auto f = [k](double t) { return chi2_density_sub(k, t); };
    const double b = std::sqrt(x);
    const double fa = f(0.0);
    const double fm = f(0.5 * b);
    const double fb = f(b);
    const double whole = b / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, 0.0, b, fa, fm, fb, whole, 1e-12, 50);
}

double chi2_quantile_simpson(int k, double p) {
    double lo = 0.0;
    double hi = 1.0;
    while (chi2_cdf_simpson(k, hi) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chi2_cdf_simpson(k, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Vector rollout_outputs(const Matrix& A, const Matrix& B, const Matrix& C, const Vector& mu, const Vector& U, int r,
                       int horizon) {
    const int m = static_cast<int>(B.cols());
    const int d = static_cast<int>(C.rows());
    Vector x = mu;
    Vector out(d * horizon);
    for (int t = 0; t < r + horizon - 1; ++t) {
        const Vector u = t < horizon ? Vector(U.segment(t * m, m)) : Vector::Zero(m);
        x = A * x + B * u;
        const int h = t + 1;
        if (h >= r) out.segment((h - r) * d, d) = C * x;
    }
    return out;
}

Matrix random_spd(int n, double lo, double hi, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
    const Matrix Q = qr.householderQ();
    std::uniform_real_distribution<double> u(lo, hi);
    Vector eig(n);
    for (int i = 0; i < n; ++i) eig(i) = u(rng);
    Matrix S = Q * eig.asDiagonal() * Q.transpose();
    return 0.5 * (S + S.transpose());
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix M(rows, cols);
    for (int i = 0; i < M.size(); ++i) M.data()[i] = g(rng);
    return M;
}

}  // namespace oracle
