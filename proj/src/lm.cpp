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


#include "fluoro/lm.hpp"

#include <algorithm>
#include <cmath>

namespace fluoro {

namespace {

void project(Eigen::VectorXd& p, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    if (lower.size() == p.size()) {
        p = p.cwiseMax(lower);
    }
    if (upper.size() == p.size()) {
        p = p.cwiseMin(upper);
    }
}

} // namespace

LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0, const LmOptions& options,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    LmResult res;
    project(p0, lower, upper);
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    fn(p0, r, &J);
    double cost = 0.5 * r.squaredNorm();
    double lambda = options.initial_damping;
    Eigen::VectorXd p = std::move(p0);
    Eigen::VectorXd r_new;

    for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
        if (cost == 0.0) {
            res.converged = true;
            break;
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::VectorXd diag = A.diagonal().cwiseMax(1e-12 * std::max(1.0, A.diagonal().maxCoeff()));

        bool accepted = false;
        while (lambda < 1e16) {
            Eigen::MatrixXd damped = A;
            damped.diagonal() += lambda * diag;
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            Eigen::VectorXd trial = p + step;
            project(trial, lower, upper);
            fn(trial, r_new, nullptr);
            const double trial_cost = 0.5 * r_new.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double decrease = (cost - trial_cost) / cost;
                const double moved = (trial - p).norm() / (p.norm() + 1e-12);
                p = std::move(trial);
                cost = trial_cost;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (decrease < options.cost_tolerance || moved < options.step_tolerance) {
                    res.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            res.converged = true; // no descent direction left at this precision
            break;
        }
        fn(p, r, &J);
        if (res.converged) {
            break;
        }
    }
    res.params = std::move(p);
    res.cost = cost;
    return res;
}

} // namespace fluoro
