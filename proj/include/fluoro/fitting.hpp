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

#include "fluoro/analytic.hpp"
#include "fluoro/material.hpp"
#include "fluoro/rerad.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fluoro {

struct FitConfig {
    std::size_t q = 1; // Gaussian count, 1..4
    int max_iterations = 300;
    double tolerance = 1e-14;
    std::uint64_t seed = 1;
    std::size_t starts = 3; // multi-start count for q >= 2
};

struct FluorescenceFit {
    std::vector<Gaussian2D> lobes; // physical amplitudes
    double rms = 0.0;              // over samples with lambda_o > lambda_i
    bool trivial = false;          // input had no off-diagonal mass
};

/// Least-squares fit of Q axis-aligned Gaussians to a normalized fluorescence
/// matrix (N x N, rows lambda_o). Only samples above the diagonal enter the
/// residual. Models of every order 1..Q are fitted in turn, each warm-started
/// from the previous one, so the residual never increases with Q.
FluorescenceFit fit_fluorescence(std::span<const double> fbar, const WavelengthGrid& grid, const FitConfig& config = {});

struct DiagonalFit {
    DiagonalModel model;
    double rms = 0.0;
};

/// Fits `count` Gaussians with non-negative amplitudes to a reflectance
/// spectrum, starting from evenly spaced lobes.
DiagonalFit fit_diagonal(const Spectrum& rho, std::size_t count = 6);

struct CmfFit {
    std::vector<Gaussian1D> gaussians; // sorted by mean
    double rms = 0.0;
};

/// Fits `count` Gaussians to a colour matching function, starting from its
/// most prominent local maxima.
CmfFit fit_cmf(const Spectrum& cmf, std::size_t count);

/// Whole-material fit: decomposition, Q-lobe fit of the normalized part and
/// a 6-lobe diagonal fit. Amplitudes are expressed as alpha_bar relative to
/// the conservative bound, clamped to [0, 1] and rescaled so they sum to at
/// most 1; `clamped_lobes` counts the lobes that had to be scaled down.
struct MaterialFit {
    FluorescentMaterial material;
    FluorescenceFit fluorescence;
    DiagonalFit diagonal;
    std::size_t clamped_lobes = 0;
    std::size_t clamped_diagonal = 0; // from decomposition
};

MaterialFit fit_material(const SpectralReradMatrix& p, const FitConfig& config = {});

/// Linear blend of lobe parameters (alpha_bar, means, spreads) by index.
/// The shorter lobe list is padded with zero-strength copies of the other
/// material's lobes. Albedo, diagonal model and notes come from `a`.
FluorescentMaterial interpolate_materials(const FluorescentMaterial& a, const FluorescentMaterial& b, double t);

} // namespace fluoro
