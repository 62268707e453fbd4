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
#include "d2oc/diagnostics.hpp"

#include <stdexcept>

namespace d2oc {

ConvergenceFit convergence_diagnostics(const std::vector<std::pair<double, double>>& series,
                                       double residual_fraction) {
    if (series.size() < 10) throw std::invalid_argument("convergence fit needs at least 10 points");
    std::vector<std::pair<double, double>> tail;
    for (std::size_t i = series.size() / 2; i < series.size(); ++i) {
        if (series[i].first > 0.0) tail.emplace_back(1.0 / series[i].first, series[i].second);
    }
    ConvergenceFit fit;
    fit.points = static_cast<int>(tail.size());
    if (tail.empty()) throw std::invalid_argument("convergence fit needs points with k > 0");

    const double n = static_cast<double>(tail.size());
    double mx = 0.0, mw = 0.0;
    for (const auto& [x, w] : tail) {
        mx += x;
        mw += w;
    }
    mx /= n;
    mw /= n;
    double sxx = 0.0, sxw = 0.0, sww = 0.0;
    for (const auto& [x, w] : tail) {
        sxx += (x - mx) * (x - mx);
        sxw += (x - mx) * (w - mw);
        sww += (w - mw) * (w - mw);
    }
    fit.tail_variance = sww / n;
    if (sww == 0.0 || sxx == 0.0) {
        fit.C = 0.0;
        fit.epsilon = mw;
    } else {
        fit.C = sxw / sxx;
        fit.epsilon = mw - fit.C * mx;
    }
    double ss = 0.0;
    for (const auto& [x, w] : tail) {
        const double e = w - (fit.epsilon + fit.C * x);
        ss += e * e;
    }
    fit.residual = ss / n;
    fit.consistent = fit.residual <= residual_fraction * fit.tail_variance;
    return fit;
}

}  // namespace d2oc
