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
#include "fluoro/illuminants.hpp"
#include "fluoro/image.hpp"
#include "fluoro/material.hpp"
#include "fluoro/palette.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace fluoro {

/// Lambertian sphere lit by one directional light plus a constant ambient
/// term. Parameter textures are sampled nearest-neighbour in the sphere's
/// longitude/latitude parameterization.
struct PreviewScene {
    FluorescentMaterial material;
    std::string illuminant = "D65";
    std::optional<std::string> right_illuminant; // split view: right half lit by this
    std::size_t width = 256;
    std::size_t height = 256;
    double exposure = 1.0;
    Eigen::Vector3d light_dir{-0.4, 0.5, 0.77};
    double ambient = 0.1;

    std::optional<ImageF> albedo_map;   // texel RGB used as XYZ albedo
    std::optional<ImageF> strength_map; // channel mean -> total alpha_bar, split in the material's proportions
    std::optional<ImageF> mu_a_map;     // channel mean in [0, 1] -> [mu_a_lo, mu_a_hi]
    double mu_a_lo = 350.0;
    double mu_a_hi = 500.0;
    std::optional<ImageF> hsv_map; // texel RGB -> HSV -> (mu_e, sigma_e, alpha_bar) of lobe 0; other lobes scaled to fit
    HsvMapping hsv_mapping;
};

struct RenderResult {
    ImageF xyz;          // total c_o
    ImageF fluorescent;  // fluorescent component c_o,f
    ImageRGB8 display;   // sRGB of xyz
    std::size_t clipped = 0;
    std::size_t invalid_texels = 0; // texels whose mapped parameters were out of range (clamped)
};

RenderResult render_sphere(const PreviewScene& scene, const SensitivityBasis& basis, const IlluminantRegistry& registry);

struct HeatmapConfig {
    bool log_scale = false;
    bool signed_map = false; // blue positive, red negative
    std::size_t cell = 1;    // pixels per matrix entry
};

/// Matrix entries (rows = lambda_o, cols = lambda_i) as an image with
/// lambda_i increasing to the right and lambda_o increasing upwards: entry
/// (o, i) covers pixel column i * cell and row (n - 1 - o) * cell.
ImageRGB8 heatmap(const Eigen::MatrixXd& matrix, const HeatmapConfig& config = {});

struct HeatmapPixel {
    std::size_t x;
    std::size_t y;
};
HeatmapPixel heatmap_pixel(std::size_t rows, std::size_t out_index, std::size_t in_index, std::size_t cell = 1);
/// Inverse mapping: (out_index, in_index) of a pixel.
std::pair<std::size_t, std::size_t> heatmap_entry(std::size_t rows, std::size_t x, std::size_t y, std::size_t cell = 1);

} // namespace fluoro
