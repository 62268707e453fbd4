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
#ifndef D2OC_MODELS_HPP
#define D2OC_MODELS_HPP

#include "d2oc/lti_model.hpp"

namespace d2oc::models {

/**
 * Forward-Euler double integrator per axis, state ordered
 * [p_1, v_1, ..., p_k, v_k], input = acceleration per axis, output = position.
 *   p+ = p + dt v,  v+ = v + dt u
 */
AgentModel double_integrator(int axes, double dt, double process_var, double measurement_var);

struct HoverParameters {
    double dt = 0.1;
    double mass = 1.0;
    double gravity = 9.81;
    double inertia_roll = 1.0;
    double inertia_pitch = 1.0;
    double inertia_yaw = 1.0;
};

/**
 * Small-angle hover linearization of a quadrotor, forward-Euler discretized.
 *
 * State  [x, xd, y, yd, z, zd, phi, phid, theta, thetad, psi, psid]
 * Input  [tau_phi, tau_theta, tau_psi, thrust]  (thrust as deviation from m g)
 * Output [x, y, z]
 *
 * Lateral position sees the torques through four integrators; altitude sees
 * thrust through two.
 */
AgentModel quadrotor_hover(const HoverParameters& params, double process_var, double measurement_var);

}  // namespace d2oc::models

#endif  // D2OC_MODELS_HPP
