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
#include "fluoro/color.hpp"
#include "fluoro/illuminants.hpp"
#include "fluoro/image.hpp"
#include "fluoro/rerad.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fluoro {

/// Everything a palette holds fixed: albedo, illuminant and absorption lobe.
struct PaletteContext {
    Eigen::Vector3d albedo_xyz{0.14, 0.14, 0.2};
    std::string illuminant = "D65";
    double mu_a = 420.0;
    double sigma_a = 100.0;
    double alpha_bar = 1.0;
    bool fluorescent_only = false; // display c_o,f instead of c_o
    double exposure = 1.0;         // on top of the D65 white normalization
};

/// Emission mean along x (left to right), emission spread along y (top to
/// bottom), both inclusive.
struct PaletteAxes {
    double mu_lo = 380.0;
    double mu_hi = 720.0;
    std::size_t mu_steps = 64;
    double sigma_lo = 5.0;
    double sigma_hi = 120.0;
    std::size_t sigma_steps = 64;
};

struct PaletteCell {
    double mu_e = 0.0;
    double sigma_e = 0.0;
    double alpha = 0.0;          // resolved amplitude alpha_bar * alpha_max
    Eigen::Vector3d total;       // c_o (XYZ)
    Eigen::Vector3d fluorescent; // c_o,f (XYZ)
    DisplayColor display;
};

struct Palette {
    PaletteContext context;
    PaletteAxes axes;
    std::vector<PaletteCell> cells; // row-major, row = spread index
    ImageRGB8 image;                // one pixel per cell
    std::size_t clipped = 0;

    const PaletteCell& cell(std::size_t row, std::size_t col) const;
};

/// Display scale shared by palettes and previews: 1 / Y of D65 (or E when
/// D65 is not registered) under `basis`.
double display_normalization(const IlluminantRegistry& registry, const SensitivityBasis& basis);

/// Colour of a single (mu_e, sigma_e) swatch; generate_palette uses exactly
/// this for every cell.
PaletteCell evaluate_swatch(const PaletteContext& ctx, double mu_e, double sigma_e, const SensitivityBasis& basis,
                            const IlluminantRegistry& registry);

/// Throws std::invalid_argument on empty or out-of-range axes (means must lie
/// in [300, 800], spreads in [1, 200]).
Palette generate_palette(const PaletteContext& ctx, const PaletteAxes& axes, const SensitivityBasis& basis,
                         const IlluminantRegistry& registry);

struct PickedParams {
    double mu_e;
    double sigma_e;
    double alpha;
};

/// Throws std::out_of_range for indices outside the palette.
PickedParams pick(const Palette& palette, std::size_t row, std::size_t col);

nlohmann::json palette_json(const Palette& palette);

/// Hue to emission mean, saturation to emission spread, value to strength.
struct HsvMapping {
    double mu_at_hue0 = 620.0; // red hues land on long wavelengths
    double mu_at_hue1 = 420.0;
    double sigma_lo = 10.0; // at full saturation
    double sigma_hi = 120.0;
};

struct HsvParams {
    double mu_e;
    double sigma_e;
    double alpha_bar;
};

HsvParams hsv_to_params(double h, double s, double v, const HsvMapping& mapping = {});

/// RGB in [0, 1] to HSV with h in [0, 1).
Eigen::Vector3d rgb_to_hsv(const Eigen::Vector3d& rgb);

} // namespace fluoro
