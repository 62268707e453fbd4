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
#ifndef D2OC_CHI_SQUARED_HPP
#define D2OC_CHI_SQUARED_HPP

namespace d2oc {

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// P(X <= x) for X ~ chi^2 with `dof` degrees of freedom.
double chi2_cdf(int dof, double x);

/// Inverse of chi2_cdf by bisection, absolute tolerance 1e-9.
double chi2_quantile(int dof, double probability);

}  // namespace d2oc

#endif  // D2OC_CHI_SQUARED_HPP
