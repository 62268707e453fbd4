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
#include "d2oc/lti_model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace d2oc {

namespace {

void require_psd(const Matrix& sigma, const char* name) {
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::invalid_argument(std::string(name) + " is not symmetric");
    }
    if (!sigma.allFinite()) {
        throw std::invalid_argument(std::string(name) + " has non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw std::invalid_argument(std::string(name) + " is not positive semidefinite");
    }
}

int numerical_rank(const Eigen::JacobiSVD<Matrix>& svd) {
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double threshold = s(0) * 1e-10;
    return static_cast<int>((s.array() > threshold).count());
}

}  // namespace

AgentModel::AgentModel(Matrix A, Matrix B, Matrix C, Matrix sigma_w, Matrix sigma_v)
    : A_(std::move(A)),
      B_(std::move(B)),
      C_(std::move(C)),
      sigma_w_(std::move(sigma_w)),
      sigma_v_(std::move(sigma_v)) {
    const auto n = A_.rows();
    if (n == 0 || A_.cols() != n) throw DimensionError("A must be square and non-empty");
    if (B_.rows() != n || B_.cols() == 0) throw DimensionError("B must have n rows and m >= 1 columns");
    if (C_.cols() != n || C_.rows() == 0) throw DimensionError("C must have n columns and d >= 1 rows");
    if (sigma_w_.rows() != n || sigma_w_.cols() != n) throw DimensionError("Sigma_w must be n x n");
    if (sigma_v_.rows() != C_.rows() || sigma_v_.cols() != C_.rows()) {
        throw DimensionError("Sigma_v must be d x d");
    }
    require_psd(sigma_w_, "Sigma_w");
    require_psd(sigma_v_, "Sigma_v");
    w_factor_ = psd_factor(sigma_w_);
    v_factor_ = psd_factor(sigma_v_);
}

bool AgentModel::operator==(const AgentModel& o) const {
    return A_ == o.A_ && B_ == o.B_ && C_ == o.C_ && sigma_w_ == o.sigma_w_ &&
           sigma_v_ == o.sigma_v_;
}

AssumptionReport check_assumptions(const AgentModel& model) {
    AssumptionReport report;
    const Matrix& A = model.A();
    const Matrix& B = model.B();
    const int n = model.state_dim();
    const int m = model.input_dim();

    Matrix kalman(n, n * m);
    Matrix block = B;
    for (int i = 0; i < n; ++i) {
        kalman.middleCols(i * m, m) = block;
        block = A * block;
    }
    Eigen::JacobiSVD<Matrix> svd(kalman);
    report.controllability_rank = numerical_rank(svd);
    report.controllable = report.controllability_rank == n;
    if (!report.controllable) {
        std::ostringstream os;
        os << "controllability matrix has rank " << report.controllability_rank << " < " << n;
        report.details.push_back(os.str());
    }

    Eigen::EigenSolver<Matrix> eig(A, false);
    const Eigen::VectorXcd lambdas = eig.eigenvalues();

    // Defective eigenvalues scatter by ~eps^(1/k) around the true value, so
    // cluster before judging modulus and multiplicity.
    std::vector<bool> used(lambdas.size(), false);
    const double cluster_tol = 1e-3;
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    bool in_disk = true;
    bool non_defective = true;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
        if (used[i]) continue;
        std::complex<double> sum = 0.0;
        int algebraic = 0;
        for (Eigen::Index j = i; j < lambdas.size(); ++j) {
            if (!used[j] && std::abs(lambdas(j) - lambdas(i)) < cluster_tol) {
                used[j] = true;
                sum += lambdas(j);
                ++algebraic;
            }
        }
        const std::complex<double> lambda = sum / static_cast<double>(algebraic);
        const double modulus = std::abs(lambda);
        if (modulus > 1.0 + 1e-9) {
            in_disk = false;
            std::ostringstream os;
            os << "eigenvalue " << lambda << " has modulus " << modulus << " > 1";
            report.details.push_back(os.str());
            continue;
        }
        if (modulus < 1.0 - 1e-9) continue;

        Eigen::MatrixXcd shifted = A.cast<std::complex<double>>();
        shifted.diagonal().array() -= lambda;
        Eigen::JacobiSVD<Eigen::MatrixXcd> csvd(shifted);
        const auto& s = csvd.singularValues();
        const int rank = static_cast<int>((s.array() > 1e-9 * scale).count());
        const int geometric = n - rank;
        if (geometric < algebraic) {
            non_defective = false;
            std::ostringstream os;
            os << "unit-modulus eigenvalue " << lambda << " is defective (algebraic "
               << algebraic << ", geometric " << geometric << ")";
            report.details.push_back(os.str());
        }
    }
    report.eigenvalues_in_unit_disk = in_disk;
    report.marginally_stable = in_disk && non_defective;
    return report;
}

std::optional<int> relative_degree(const AgentModel& model) {
    const Matrix& A = model.A();
    const Matrix& B = model.B();
    const Matrix& C = model.C();
    const int n = model.state_dim();
    Matrix power = Matrix::Identity(n, n);
    for (int l = 1; l <= n; ++l) {
        const Matrix markov = C * power * B;
        const double scale = C.norm() * power.norm() * B.norm();
        if (markov.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) return l;
        power = power * A;
    }
    return std::nullopt;
}

PredictionMatrices build_prediction_matrices(const AgentModel& model, int horizon) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const auto r = relative_degree(model);
    if (!r) throw std::invalid_argument("output relative degree is undefined for this model");

    const int n = model.state_dim();
    const int m = model.input_dim();
    const int d = model.output_dim();
    const int H = horizon;

    std::vector<Matrix> powers;
    powers.reserve(*r + H);
    powers.push_back(Matrix::Identity(n, n));
    for (int i = 1; i < *r + H; ++i) powers.push_back(powers.back() * model.A());

    std::vector<Matrix> markov(H);  // C A^{r-1+l} B, l = 0..H-1
    for (int l = 0; l < H; ++l) markov[l] = model.C() * powers[*r - 1 + l] * model.B();

    PredictionMatrices pred;
    pred.r = *r;
    pred.horizon = H;
    pred.theta = Matrix::Zero(d * H, m * H);
    pred.phi = Matrix::Zero(d * H, n);
    for (int p = 0; p < H; ++p) {
        for (int s = 0; s <= p; ++s) pred.theta.block(p * d, s * m, d, m) = markov[p - s];
        pred.phi.middleRows(p * d, d) = model.C() * powers[*r + p];
    }
    return pred;
}

Vector propagate_mean(const AgentModel& model, const Vector& mu, std::span<const Vector> inputs) {
    if (mu.size() != model.state_dim()) throw DimensionError("mean state has wrong dimension");
    Vector x = mu;
    for (const Vector& u : inputs) {
        if (u.size() != model.input_dim()) throw DimensionError("input has wrong dimension");
        x = model.A() * x + model.B() * u;
    }
    return x;
}

Matrix noise_covariance_h(const AgentModel& model, int h) {
    if (h < 1) throw std::invalid_argument("h must be >= 1");
    const Matrix& A = model.A();
    // Horner form: S_h = A S_{h-1} A^T + Sigma_w.
    Matrix sigma = model.sigma_w();
    for (int i = 1; i < h; ++i) sigma = A * sigma * A.transpose() + model.sigma_w();
    return 0.5 * (sigma + sigma.transpose());
}

Matrix psd_factor(const Matrix& sigma) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sigma + sigma.transpose()));
    if (eig.info() != Eigen::Success) throw std::runtime_error("covariance factorization failed");
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

Vector sample_gaussian(const Matrix& factor, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(factor.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    return factor * z;
}

StepOutcome simulate_step(const AgentModel& model, const Vector& x, const Vector& u, Rng& rng) {
    if (x.size() != model.state_dim()) throw DimensionError("state has wrong dimension");
    if (u.size() != model.input_dim()) throw DimensionError("input has wrong dimension");
    StepOutcome out;
    out.x_next = model.A() * x + model.B() * u + sample_gaussian(model.process_noise_factor(), rng);
    out.y = model.C() * out.x_next + sample_gaussian(model.measurement_noise_factor(), rng);
    return out;
}

SteadyStateKalman::SteadyStateKalman(const AgentModel& model, int max_iterations, double tolerance) {
    const Matrix& A = model.A();
    const Matrix& C = model.C();
    Matrix P = model.sigma_w() + Matrix::Identity(A.rows(), A.rows());
    bool converged = false;
    for (int it = 0; it < max_iterations; ++it) {
        const Matrix S = C * P * C.transpose() + model.sigma_v();
        const Matrix K = P * C.transpose() * S.completeOrthogonalDecomposition().pseudoInverse();
        Matrix next = A * (P - K * C * P) * A.transpose() + model.sigma_w();
        next = 0.5 * (next + next.transpose());
        const double change = (next - P).cwiseAbs().maxCoeff();
        P = std::move(next);
        if (change <= tolerance * std::max(1.0, P.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
        }
    }
    if (!converged) throw std::runtime_error("Riccati iteration for the Kalman gain did not converge");
    prior_cov_ = P;
    const Matrix S = C * P * C.transpose() + model.sigma_v();
    gain_ = P * C.transpose() * S.completeOrthogonalDecomposition().pseudoInverse();
}

Vector SteadyStateKalman::update(const AgentModel& model, const Vector& mu, const Vector& u,
                                 const Vector& y) const {
    const Vector prior = model.A() * mu + model.B() * u;
    return prior + gain_ * (y - model.C() * prior);
}

}  // namespace d2oc
