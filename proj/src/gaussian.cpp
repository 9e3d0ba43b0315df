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


#include "fluoro/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace fluoro {

double Gaussian1D::operator()(double x) const {
    const double d = (x - mean) / std;
    return amplitude * std::exp(-0.5 * d * d);
}

double Gaussian1D::integral() const { return amplitude * std * std::sqrt(2.0 * std::numbers::pi); }

double Gaussian2D::operator()(double lambda_i, double lambda_o) const {
    const double da = (lambda_i - mean_a) / std_a;
    const double de = (lambda_o - mean_e) / std_e;
    return amplitude * std::exp(-0.5 * (da * da + de * de));
}

double eval_gaussian1d(const Gaussian1D& g, double lambda) { return g(lambda); }

Gaussian1D gaussian_product_1d(const Gaussian1D& g1, const Gaussian1D& g2) {
    const double v1 = g1.std * g1.std;
    const double v2 = g2.std * g2.std;
    const double var = v1 * v2 / (v1 + v2);
    const double mean = (g1.mean * v2 + g2.mean * v1) / (v1 + v2);
    const double dm = g1.mean - g2.mean;
    const double amplitude = g1.amplitude * g2.amplitude * std::exp(-dm * dm / (2.0 * (v1 + v2)));
    return {amplitude, mean, std::sqrt(var)};
}

Spectrum discretize(const Gaussian1D& g, const WavelengthGrid& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = g(grid[i]);
    }
    return Spectrum(grid, std::move(values));
}

} // namespace fluoro
