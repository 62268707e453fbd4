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
#include "d2oc/chi_squared.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace d2oc {

namespace {

double gamma_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail Q(a, x) by the modified Lentz continued fraction.
double gamma_continued_fraction(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_continued_fraction(a, x);
}

double chi2_cdf(int dof, double x) {
    if (dof < 1) throw std::invalid_argument("chi-squared degrees of freedom must be >= 1");
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double probability) {
    if (dof < 1) throw std::invalid_argument("chi-squared degrees of freedom must be >= 1");
    if (!(probability > 0.0 && probability < 1.0)) {
        throw std::invalid_argument("chi-squared probability must lie in (0, 1)");
    }
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(dof));
    while (chi2_cdf(dof, hi) < probability) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(dof, mid) < probability) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace d2oc
