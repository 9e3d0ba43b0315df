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

#include "fluoro/basis.hpp"
#include "fluoro/gaussian.hpp"
#include "fluoro/rerad.hpp"

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace fluoro {

/// Upper limit returned by the energy bounds when the emission lobe carries
/// (almost) no reradiated energy.
inline constexpr double kAlphaMaxCap = 1e6;

/// One lobe of the normalized fluorescence model in artist units: strength
/// alpha_bar in [0, 1] is scaled by the conservative energy bound to give the
/// physical amplitude.
struct FluoLobe {
    double alpha_bar = 1.0;
    double mu_a = 400.0;    // absorption mean, nm
    double sigma_a = 30.0;  // absorption spread, nm
    double mu_e = 550.0;    // emission mean, nm
    double sigma_e = 30.0;  // emission spread, nm

    bool operator==(const FluoLobe&) const = default;
};

/// Reflectance along the diagonal as a sum of (up to six) 1D Gaussians.
struct DiagonalModel {
    std::vector<Gaussian1D> gaussians;

    double operator()(double lambda) const;
};

/// 1 / integral_0^inf G(mu_a, lambda_o) d lambda_o with the Heaviside factor
/// dropped, i.e. 1 / (sqrt(pi/2) sigma_e (1 + erf(mu_e / (sqrt(2) sigma_e)))).
/// Never larger than the exact bound; capped at `cap`.
double alpha_max_conservative(double mu_e, double sigma_e, double cap = kAlphaMaxCap);

/// Exact bound 1 / max_{lambda_i} integral_{lambda_o > lambda_i} G, with
/// lambda_i restricted to the samples of `grid` and the lambda_o integral
/// done by fine composite Simpson quadrature over the real line. Slow;
/// meant for validation.
double alpha_max_numeric(double mu_a, double sigma_a, double mu_e, double sigma_e, const WavelengthGrid& grid,
                         double cap = kAlphaMaxCap);

/// Physical 2D Gaussian of a lobe: amplitude = alpha_bar * alpha_max_conservative.
Gaussian2D resolve_lobe(const FluoLobe& lobe);
std::vector<Gaussian2D> resolve_lobes(std::span<const FluoLobe> lobes);

/// Sum of the lobes times H(lambda_o - lambda_i), with H(0) = 0.
double eval_fbar(std::span<const Gaussian2D> lobes, double lambda_i, double lambda_o);

/// Covariance and mean of the product Gaussian after the two shears that map
/// the diagonal to lambda_i'' = 0 and make the Gaussian axis-aligned.
struct ShearParameters {
    Eigen::Matrix2d first_shear;  // S_i
    Eigen::Matrix2d second_shear; // S_o
    Eigen::Matrix2d covariance;   // diag(s_j^2 + s_k^2, s_j^2 s_k^2 / (s_j^2 + s_k^2))
    Eigen::Vector2d mean;         // (mu_j - mu_k, (s_j^2 mu_k + s_k^2 mu_j) / (s_j^2 + s_k^2))
};

/// `absorption` and `emission` are the per-axis product Gaussians (mean and
/// std are used; amplitude is ignored).
ShearParameters shear_parameters(const Gaussian1D& absorption, const Gaussian1D& emission);

/// Exact value of the integral over R^2 of
///     fluo(li, lo) g_j(li) g_k(lo) H(lo - li)
/// = pi a_jk s_j s_k erfc((mu_j - mu_k) / sqrt(2 (s_j^2 + s_k^2)))
/// where (a_jk, mu_j, s_j, mu_k, s_k) come from the per-axis Gaussian products.
double reduce_pair_closed_form(const Gaussian2D& fluo, const Gaussian1D& g_j, const Gaussian1D& g_k);

/// M x M atom-space matrix, entry (e, a) = closed form with atom a on the
/// absorption axis and atom e on the emission axis, summed over lobes.
Eigen::MatrixXd atom_space_fluorescence(std::span<const Gaussian2D> lobes, const SensitivityBasis& basis);

/// Reduced normalized fluorescence T_G^T F° T_G C. Requires a Gaussian basis.
ReducedRerad reduce_fluorescence(std::span<const Gaussian2D> lobes, const SensitivityBasis& basis);
ReducedRerad reduce_fluorescence(std::span<const FluoLobe> lobes, const SensitivityBasis& basis);

/// Reduced reflectance of a Gaussian diagonal, with each entry a triple
/// Gaussian product integrated in closed form over the real line.
ReducedRerad reduce_diagonal_analytic(const DiagonalModel& diagonal, const SensitivityBasis& basis);

/// Samples the model on the grid (N x N, rows lambda_o), zero on and below
/// the diagonal.
std::vector<double> discretize_fbar(std::span<const Gaussian2D> lobes, const WavelengthGrid& grid);

Spectrum discretize_diagonal(const DiagonalModel& diagonal, const WavelengthGrid& grid);

} // namespace fluoro
