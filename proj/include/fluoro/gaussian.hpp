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

#include "fluoro/grid.hpp"

namespace fluoro {

// All Gaussians here use the unnormalized amplitude convention
//
//     g(x) = amplitude * exp(-(x - mean)^2 / (2 std^2))
//
// i.e. `amplitude` is the peak value, not the integral. Published basis
// parameters (the XYZ fits) are given in this form and the closed-form
// reductions depend on it.

struct Gaussian1D {
    double amplitude = 1.0;
    double mean = 0.0; // nm
    double std = 1.0;  // nm

    double operator()(double x) const;

    /// Integral over the real line: amplitude * std * sqrt(2 pi).
    double integral() const;

    bool operator==(const Gaussian1D&) const = default;
};

/// Axis-aligned bivariate Gaussian over (lambda_i, lambda_o). The `a`
/// (absorption) axis is lambda_i and the `e` (emission) axis is lambda_o.
struct Gaussian2D {
    double amplitude = 1.0;
    double mean_a = 0.0;
    double std_a = 1.0;
    double mean_e = 0.0;
    double std_e = 1.0;

    double operator()(double lambda_i, double lambda_o) const;

    Gaussian1D absorption() const { return {1.0, mean_a, std_a}; }
    Gaussian1D emission() const { return {1.0, mean_e, std_e}; }

    bool operator==(const Gaussian2D&) const = default;
};

double eval_gaussian1d(const Gaussian1D& g, double lambda);

/// Closed-form product g1(x) * g2(x) as a single Gaussian.
Gaussian1D gaussian_product_1d(const Gaussian1D& g1, const Gaussian1D& g2);

/// Samples `g` on every grid wavelength. No clamping to the grid range.
Spectrum discretize(const Gaussian1D& g, const WavelengthGrid& grid);

} // namespace fluoro
