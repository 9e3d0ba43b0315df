/*
 * Copyright (C) 2026 The Fluoro Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <Eigen/Dense>
#include <functional>

namespace fluoro {

/// Residuals r(p) and, when `jacobian` is non-null, dr/dp (rows = residuals).
using ResidualFn = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian)>;

struct LmOptions {
    int max_iterations = 200;
    double cost_tolerance = 1e-14; // relative cost decrease treated as converged
    double step_tolerance = 1e-12; // relative parameter change treated as converged
    double initial_damping = 1e-3;
};

struct LmResult {
    Eigen::VectorXd params;
    double cost = 0.0; // 0.5 * |r|^2
    int iterations = 0;
    bool converged = false;
};

/// Damped Gauss-Newton with Marquardt diagonal scaling. Parameters are
/// projected onto [lower, upper] after every step (pass empty vectors for
/// an unconstrained problem). Deterministic.
LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0, const LmOptions& options = {},
                             const Eigen::VectorXd& lower = {}, const Eigen::VectorXd& upper = {});

} // namespace fluoro
