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
#ifndef D2OC_TYPES_HPP
#define D2OC_TYPES_HPP

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <string>

namespace d2oc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Every agent owns one of these; streams are never shared across agents.
using Rng = std::mt19937_64;

/// Thrown when operand shapes do not conform.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace d2oc

#endif  // D2OC_TYPES_HPP
