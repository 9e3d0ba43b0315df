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


#include "fluoro/palette.hpp"

#include "fluoro/analytic.hpp"
#include "fluoro/material.hpp"

#include <cmath>
#include <stdexcept>

namespace fluoro {

namespace {

double axis_value(double lo, double hi, std::size_t steps, std::size_t k) {
    if (steps == 1) {
        return lo;
    }
    if (k + 1 == steps) {
        return hi;
    }
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

void check_axes(const PaletteAxes& a) {
    if (a.mu_steps == 0 || a.sigma_steps == 0) {
        throw std::invalid_argument("palette axes need at least one step");
    }
    if (!(a.mu_lo <= a.mu_hi) || !(a.sigma_lo <= a.sigma_hi)) {
        throw std::invalid_argument("palette axis ranges are empty");
    }
    if (a.mu_lo < kMinMeanNm || a.mu_hi > kMaxMeanNm) {
        throw std::invalid_argument("palette emission means must lie in [300, 800] nm");
    }
    if (a.sigma_lo < 1.0 || a.sigma_hi > 200.0) {
        throw std::invalid_argument("palette emission spreads must lie in [1, 200] nm");
    }
}

} // namespace

const PaletteCell& Palette::cell(std::size_t row, std::size_t col) const {
    if (row >= axes.sigma_steps || col >= axes.mu_steps) {
        throw std::out_of_range("palette cell (" + std::to_string(row) + ", " + std::to_string(col) +
                                ") is outside the palette");
    }
    return cells[row * axes.mu_steps + col];
}

double display_normalization(const IlluminantRegistry& registry, const SensitivityBasis& basis) {
    const std::string ref = registry.contains("D65") ? "D65" : "E";
    const double y = registry.color(ref, basis)(static_cast<Eigen::Index>(basis.luminance_channel()));
    return y > 0.0 ? 1.0 / y : 1.0;
}

PaletteCell evaluate_swatch(const PaletteContext& ctx, double mu_e, double sigma_e, const SensitivityBasis& basis,
                            const IlluminantRegistry& registry) {
    const ReducedRerad r = albedo_to_reduced_R(albedo_in_basis(ctx.albedo_xyz, basis), basis);
    const FluoLobe lobe{ctx.alpha_bar, ctx.mu_a, ctx.sigma_a, mu_e, sigma_e};
    const ReducedRerad f = reduce_fluorescence(std::span<const FluoLobe>(&lobe, 1), basis);
    const OutgoingSplit split = split_outgoing(r, f, registry.color(ctx.illuminant, basis));

    PaletteCell cell;
    cell.mu_e = mu_e;
    cell.sigma_e = sigma_e;
    cell.alpha = resolve_lobe(lobe).amplitude;
    cell.total = split.total().head<3>();
    cell.fluorescent = split.fluorescent.head<3>();
    const double scale = ctx.exposure * display_normalization(registry, basis);
    cell.display = xyz_to_srgb_display(ctx.fluorescent_only ? cell.fluorescent : cell.total, scale);
    return cell;
}

Palette generate_palette(const PaletteContext& ctx, const PaletteAxes& axes, const SensitivityBasis& basis,
                         const IlluminantRegistry& registry) {
    check_axes(axes);
    Palette p;
    p.context = ctx;
    p.axes = axes;
    p.image = ImageRGB8(axes.mu_steps, axes.sigma_steps);
    p.cells.reserve(axes.mu_steps * axes.sigma_steps);
    for (std::size_t row = 0; row < axes.sigma_steps; ++row) {
        const double sigma = axis_value(axes.sigma_lo, axes.sigma_hi, axes.sigma_steps, row);
        for (std::size_t col = 0; col < axes.mu_steps; ++col) {
            const double mu = axis_value(axes.mu_lo, axes.mu_hi, axes.mu_steps, col);
            PaletteCell c = evaluate_swatch(ctx, mu, sigma, basis, registry);
            std::copy(c.display.rgb.begin(), c.display.rgb.end(), p.image.at(col, row));
            p.clipped += c.display.clipped ? 1 : 0;
            p.cells.push_back(std::move(c));
        }
    }
    return p;
}

PickedParams pick(const Palette& palette, std::size_t row, std::size_t col) {
    const PaletteCell& c = palette.cell(row, col);
    return {c.mu_e, c.sigma_e, c.alpha};
}

nlohmann::json palette_json(const Palette& palette) {
    using nlohmann::json;
    const auto& a = palette.axes;
    const auto& c = palette.context;
    json j;
    j["axes"] = {{"x", {{"param", "mu_e_nm"}, {"lo", a.mu_lo}, {"hi", a.mu_hi}, {"steps", a.mu_steps}}},
                 {"y", {{"param", "sigma_e_nm"}, {"lo", a.sigma_lo}, {"hi", a.sigma_hi}, {"steps", a.sigma_steps}}}};
    j["context"] = {{"albedo_xyz", {c.albedo_xyz(0), c.albedo_xyz(1), c.albedo_xyz(2)}},
                    {"illuminant", c.illuminant},
                    {"mu_a_nm", c.mu_a},
                    {"sigma_a_nm", c.sigma_a},
                    {"alpha_bar", c.alpha_bar},
                    {"fluorescent_only", c.fluorescent_only},
                    {"exposure", c.exposure}};
    j["clipped"] = palette.clipped;
    json cells = json::array();
    for (std::size_t row = 0; row < a.sigma_steps; ++row) {
        for (std::size_t col = 0; col < a.mu_steps; ++col) {
            const auto& cell = palette.cell(row, col);
            cells.push_back({{"row", row},
                             {"col", col},
                             {"mu_e_nm", cell.mu_e},
                             {"sigma_e_nm", cell.sigma_e},
                             {"alpha", cell.alpha},
                             {"rgb", cell.display.rgb}});
        }
    }
    j["cells"] = std::move(cells);
    return j;
}

HsvParams hsv_to_params(double h, double s, double v, const HsvMapping& m) {
    if (!(h >= 0.0 && h < 1.0) || !(s >= 0.0 && s <= 1.0) || !(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("HSV components must satisfy h in [0, 1), s and v in [0, 1]");
    }
    return {m.mu_at_hue0 + h * (m.mu_at_hue1 - m.mu_at_hue0), m.sigma_hi - s * (m.sigma_hi - m.sigma_lo), v};
}

Eigen::Vector3d rgb_to_hsv(const Eigen::Vector3d& rgb) {
    const double mx = rgb.maxCoeff();
    const double mn = rgb.minCoeff();
    const double d = mx - mn;
    double h = 0.0;
    if (d > 0.0) {
        if (mx == rgb(0)) {
            h = std::fmod((rgb(1) - rgb(2)) / d, 6.0);
        } else if (mx == rgb(1)) {
            h = (rgb(2) - rgb(0)) / d + 2.0;
        } else {
            h = (rgb(0) - rgb(1)) / d + 4.0;
        }
        h /= 6.0;
        if (h < 0.0) {
            h += 1.0;
        }
        if (h >= 1.0) {
            h = 0.0;
        }
    }
    const double s = mx > 0.0 ? d / mx : 0.0;
    return {h, s, mx};
}

} // namespace fluoro
