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
#include "d2oc/models.hpp"

namespace d2oc::models {

AgentModel double_integrator(int axes, double dt, double process_var, double measurement_var) {
    if (axes < 1) throw std::invalid_argument("axes must be >= 1");
    const int n = 2 * axes;
    Matrix A = Matrix::Identity(n, n);
    Matrix B = Matrix::Zero(n, axes);
    Matrix C = Matrix::Zero(axes, n);
    for (int a = 0; a < axes; ++a) {
        A(2 * a, 2 * a + 1) = dt;
        B(2 * a + 1, a) = dt;
        C(a, 2 * a) = 1.0;
    }
    return AgentModel(A, B, C, process_var * Matrix::Identity(n, n),
                      measurement_var * Matrix::Identity(axes, axes));
}

AgentModel quadrotor_hover(const HoverParameters& p, double process_var, double measurement_var) {
    enum { X, XD, Y, YD, Z, ZD, PHI, PHID, THETA, THETAD, PSI, PSID };
    const double dt = p.dt;
    Matrix A = Matrix::Identity(12, 12);
    A(X, XD) = dt;
    A(Y, YD) = dt;
    A(Z, ZD) = dt;
    A(PHI, PHID) = dt;
    A(THETA, THETAD) = dt;
    A(PSI, PSID) = dt;
    A(XD, THETA) = dt * p.gravity;
    A(YD, PHI) = -dt * p.gravity;

    Matrix B = Matrix::Zero(12, 4);
    B(PHID, 0) = dt / p.inertia_roll;
    B(THETAD, 1) = dt / p.inertia_pitch;
    B(PSID, 2) = dt / p.inertia_yaw;
    B(ZD, 3) = dt / p.mass;

    Matrix C = Matrix::Zero(3, 12);
    C(0, X) = 1.0;
    C(1, Y) = 1.0;
    C(2, Z) = 1.0;

    return AgentModel(A, B, C, process_var * Matrix::Identity(12, 12),
                      measurement_var * Matrix::Identity(3, 3));
}

}  // namespace d2oc::models
