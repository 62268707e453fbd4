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
#ifndef D2OC_LTI_MODEL_HPP
#define D2OC_LTI_MODEL_HPP

#include "d2oc/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace d2oc {

/**
 * @brief Discrete-time stochastic LTI agent
 *
 *   x+ = A x + B u + w,   w ~ N(0, Sigma_w)
 *   y  = C x + v,         v ~ N(0, Sigma_v)
 *
 * Construction validates shapes and that both covariances are symmetric
 * PSD. Controllability and marginal stability are reported separately by
 * check_assumptions() so degenerate models can still be inspected.
 */
class AgentModel {
public:
    AgentModel(Matrix A, Matrix B, Matrix C, Matrix sigma_w, Matrix sigma_v);

    const Matrix& A() const { return A_; }
    const Matrix& B() const { return B_; }
    const Matrix& C() const { return C_; }
    const Matrix& sigma_w() const { return sigma_w_; }
    const Matrix& sigma_v() const { return sigma_v_; }

    int state_dim() const { return static_cast<int>(A_.rows()); }
    int input_dim() const { return static_cast<int>(B_.cols()); }
    int output_dim() const { return static_cast<int>(C_.rows()); }

    // Square-root factors L with L L^T = Sigma (eigen-clamped at zero).
    const Matrix& process_noise_factor() const { return w_factor_; }
    const Matrix& measurement_noise_factor() const { return v_factor_; }

    bool operator==(const AgentModel& other) const;

private:
    Matrix A_, B_, C_, sigma_w_, sigma_v_;
    Matrix w_factor_, v_factor_;
};

struct AgentState {
    Vector x;   // true state
    Vector mu;  // mean estimate used by the controller
    int k = 0;
};

struct AssumptionReport {
    bool controllable = false;
    // Every eigenvalue in the closed unit disk and none on the circle defective.
    bool marginally_stable = false;
    // Weaker: spectral radius <= 1 (defective unit eigenvalues allowed).
    bool eigenvalues_in_unit_disk = false;
    int controllability_rank = 0;
    std::vector<std::string> details;
};

AssumptionReport check_assumptions(const AgentModel& model);

/// Smallest r >= 1 with C A^{r-1} B != 0, or nullopt when none exists up to n.
std::optional<int> relative_degree(const AgentModel& model);

struct PredictionMatrices {
    Matrix theta;  // (d H) x (m H), block (p, s) = C A^{r-1+p-s} B for p >= s
    Matrix phi;    // (d H) x n, row block h = C A^{r+h}
    int r = 0;
    int horizon = 0;
};

PredictionMatrices build_prediction_matrices(const AgentModel& model, int horizon);

/// A^h mu + sum_t A^{h-1-t} B u_t with h = inputs.size().
Vector propagate_mean(const AgentModel& model, const Vector& mu, std::span<const Vector> inputs);

/// sum_{l=0}^{h-1} A^{h-1-l} Sigma_w (A^{h-1-l})^T
Matrix noise_covariance_h(const AgentModel& model, int h);

struct StepOutcome {
    Vector x_next;
    Vector y;
};

/// One noisy transition followed by a noisy measurement of the new state.
StepOutcome simulate_step(const AgentModel& model, const Vector& x, const Vector& u, Rng& rng);

/// Zero-mean Gaussian draw with covariance factor L (L L^T = Sigma).
Vector sample_gaussian(const Matrix& factor, Rng& rng);

/// Eigen-decomposition square root with negative eigenvalues clamped to zero.
Matrix psd_factor(const Matrix& sigma);

/**
 * Steady-state Kalman estimator from the discrete algebraic Riccati
 * equation of (A, C, Sigma_w, Sigma_v). Predict with the model, correct
 * with the measurement of the post-transition state.
 */
class SteadyStateKalman {
public:
    explicit SteadyStateKalman(const AgentModel& model, int max_iterations = 100000,
                               double tolerance = 1e-12);

    const Matrix& gain() const { return gain_; }
    const Matrix& prior_covariance() const { return prior_cov_; }

    Vector update(const AgentModel& model, const Vector& mu, const Vector& u,
                  const Vector& y) const;

private:
    Matrix gain_;
    Matrix prior_cov_;
};

}  // namespace d2oc

#endif  // D2OC_LTI_MODEL_HPP
