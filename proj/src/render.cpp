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


#include "fluoro/render.hpp"

#include "fluoro/color.hpp"
#include "fluoro/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace fluoro {

namespace {

struct Texel {
    std::size_t x;
    std::size_t y;
};

Texel texel_at(const ImageF& tex, double u, double v) {
    const auto x = std::min(tex.width - 1, static_cast<std::size_t>(std::max(0.0, u) * static_cast<double>(tex.width)));
    const auto y = std::min(tex.height - 1, static_cast<std::size_t>(std::max(0.0, v) * static_cast<double>(tex.height)));
    return {x, y};
}

Eigen::Vector3d sample(const ImageF& tex, double u, double v) {
    const Texel t = texel_at(tex, u, v);
    const float* p = tex.at(t.x, t.y);
    return {p[0], p[1], p[2]};
}

double clamp_counted(double v, double lo, double hi, bool& bad) {
    if (!std::isfinite(v)) {
        bad = true;
        return lo;
    }
    if (v < lo || v > hi) {
        bad = true;
    }
    return std::clamp(v, lo, hi);
}

// Material of one surface point after applying every parameter texture.
FluorescentMaterial texel_material(const PreviewScene& s, double u, double v, bool& bad) {
    FluorescentMaterial m = s.material;
    if (s.albedo_map) {
        const Eigen::Vector3d a = sample(*s.albedo_map, u, v);
        for (int c = 0; c < 3; ++c) {
            m.albedo_xyz(c) = clamp_counted(a(c), 0.0, 1.0, bad);
        }
    }
    if (s.strength_map) {
        // texel value is the total strength, shared in the material's proportions
        const double a = clamp_counted(sample(*s.strength_map, u, v).mean(), 0.0, 1.0, bad);
        double total = 0.0;
        for (const auto& l : m.lobes) {
            total += l.alpha_bar;
        }
        for (auto& l : m.lobes) {
            l.alpha_bar = total > 0.0 ? a * l.alpha_bar / total : a / static_cast<double>(m.lobes.size());
        }
    }
    if (s.mu_a_map) {
        const double t = clamp_counted(sample(*s.mu_a_map, u, v).mean(), 0.0, 1.0, bad);
        for (auto& l : m.lobes) {
            l.mu_a = s.mu_a_lo + t * (s.mu_a_hi - s.mu_a_lo);
        }
    }
    if (s.hsv_map && !m.lobes.empty()) {
        Eigen::Vector3d rgb = sample(*s.hsv_map, u, v);
        for (int c = 0; c < 3; ++c) {
            rgb(c) = clamp_counted(rgb(c), 0.0, 1.0, bad);
        }
        const Eigen::Vector3d hsv = rgb_to_hsv(rgb);
        const HsvParams p = hsv_to_params(hsv(0), hsv(1), hsv(2), s.hsv_mapping);
        m.lobes[0].mu_e = p.mu_e;
        m.lobes[0].sigma_e = p.sigma_e;
        m.lobes[0].alpha_bar = p.alpha_bar;
        double rest = 0.0;
        for (std::size_t q = 1; q < m.lobes.size(); ++q) {
            rest += m.lobes[q].alpha_bar;
        }
        if (rest > 1.0 - p.alpha_bar) {
            for (std::size_t q = 1; q < m.lobes.size(); ++q) {
                m.lobes[q].alpha_bar *= (1.0 - p.alpha_bar) / rest;
            }
        }
    }
    return m;
}

std::vector<double> material_key(const FluorescentMaterial& m) {
    std::vector<double> k{m.albedo_xyz(0), m.albedo_xyz(1), m.albedo_xyz(2)};
    for (const auto& l : m.lobes) {
        k.insert(k.end(), {l.alpha_bar, l.mu_a, l.sigma_a, l.mu_e, l.sigma_e});
    }
    return k;
}

struct Group {
    FluorescentMaterial material;
    std::vector<std::size_t> pixels;
};

// Row-major copy of an Eigen matrix for the kernels.
std::vector<double> row_major(const Eigen::MatrixXd& m) {
    std::vector<double> out(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
        }
    }
    return out;
}

} // namespace

RenderResult render_sphere(const PreviewScene& scene, const SensitivityBasis& basis, const IlluminantRegistry& registry) {
    if (scene.width == 0 || scene.height == 0) {
        throw std::invalid_argument("render size must be positive");
    }
    check(scene.material);
    const std::size_t w = scene.width;
    const std::size_t h = scene.height;
    const auto k = basis.channels();
    const Eigen::Vector3d l = scene.light_dir.normalized();

    const Eigen::VectorXd ci_left = registry.color(scene.illuminant, basis);
    const Eigen::VectorXd ci_right = registry.color(scene.right_illuminant.value_or(scene.illuminant), basis);

    RenderResult res;
    res.xyz = ImageF(w, h);
    res.fluorescent = ImageF(w, h);
    res.display = ImageRGB8(w, h);

    std::vector<double> shading(w * h, 0.0);
    std::map<std::vector<double>, Group> groups;
    const bool textured = scene.albedo_map || scene.strength_map || scene.mu_a_map || scene.hsv_map;

    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double px = 2.0 * (static_cast<double>(x) + 0.5) / static_cast<double>(w) - 1.0;
            const double py = 1.0 - 2.0 * (static_cast<double>(y) + 0.5) / static_cast<double>(h);
            const double r2 = px * px + py * py;
            if (r2 > 1.0) {
                continue;
            }
            const Eigen::Vector3d n(px, py, std::sqrt(1.0 - r2));
            const std::size_t idx = y * w + x;
            shading[idx] = std::max(0.0, n.dot(l)) + scene.ambient;

            FluorescentMaterial m = scene.material;
            if (textured) {
                const double u = 0.5 + std::atan2(n.x(), n.z()) / (2.0 * std::numbers::pi);
                const double v = 0.5 - std::asin(std::clamp(n.y(), -1.0, 1.0)) / std::numbers::pi;
                bool bad = false;
                m = texel_material(scene, u, v, bad);
                res.invalid_texels += bad ? 1 : 0;
            }
            auto [it, fresh] = groups.try_emplace(material_key(m));
            if (fresh) {
                it->second.material = std::move(m);
            }
            it->second.pixels.push_back(idx);
        }
    }

    const double scale = scene.exposure * display_normalization(registry, basis);
    const std::size_t half = (w + 1) / 2;
    std::vector<double> in;
    std::vector<double> out_total;
    std::vector<double> out_fluo;
    std::vector<double> px_scale;
    for (const auto& [key, g] : groups) {
        const MaterialReduction red = reduce_material(g.material, basis);
        const auto ident = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        const std::vector<double> m_total = row_major(red.total.m);
        const std::vector<double> m_fluo = row_major(red.fluorescence.m * (ident - red.reflectance.m));

        const std::size_t n = g.pixels.size();
        in.assign(k * n, 0.0);
        out_total.assign(k * n, 0.0);
        out_fluo.assign(k * n, 0.0);
        px_scale.assign(n, 0.0);
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t idx = g.pixels[p];
            const Eigen::VectorXd& ci = (scene.right_illuminant && idx % w >= half) ? ci_right : ci_left;
            for (std::size_t c = 0; c < k; ++c) {
                in[c * n + p] = ci(static_cast<Eigen::Index>(c));
            }
            px_scale[p] = shading[idx];
        }
        kernels::transform_colors(m_total.data(), k, in.data(), px_scale.data(), out_total.data(), n);
        kernels::transform_colors(m_fluo.data(), k, in.data(), px_scale.data(), out_fluo.data(), n);
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t idx = g.pixels[p];
            Eigen::Vector3d xyz;
            for (std::size_t c = 0; c < 3; ++c) {
                xyz(static_cast<Eigen::Index>(c)) = out_total[c * n + p];
                res.xyz.pixels[3 * idx + c] = static_cast<float>(out_total[c * n + p]);
                res.fluorescent.pixels[3 * idx + c] = static_cast<float>(out_fluo[c * n + p]);
            }
            const DisplayColor d = xyz_to_srgb_display(xyz, scale);
            std::copy(d.rgb.begin(), d.rgb.end(), res.display.pixels.begin() + static_cast<std::ptrdiff_t>(3 * idx));
            res.clipped += d.clipped ? 1 : 0;
        }
    }
    return res;
}

HeatmapPixel heatmap_pixel(std::size_t rows, std::size_t out_index, std::size_t in_index, std::size_t cell) {
    if (out_index >= rows || cell == 0) {
        throw std::out_of_range("heatmap entry outside the matrix");
    }
    return {in_index * cell, (rows - 1 - out_index) * cell};
}

std::pair<std::size_t, std::size_t> heatmap_entry(std::size_t rows, std::size_t x, std::size_t y, std::size_t cell) {
    if (cell == 0 || y / cell >= rows) {
        throw std::out_of_range("heatmap pixel outside the image");
    }
    return {rows - 1 - y / cell, x / cell};
}

ImageRGB8 heatmap(const Eigen::MatrixXd& matrix, const HeatmapConfig& config) {
    if (!matrix.allFinite()) {
        throw std::invalid_argument("heatmap of a matrix with non-finite entries");
    }
    if (config.cell == 0) {
        throw std::invalid_argument("heatmap cell size must be positive");
    }
    const auto rows = static_cast<std::size_t>(matrix.rows());
    const auto cols = static_cast<std::size_t>(matrix.cols());
    ImageRGB8 img(cols * config.cell, rows * config.cell);
    const double peak = config.signed_map ? matrix.cwiseAbs().maxCoeff() : std::max(0.0, matrix.maxCoeff());

    auto level = [&](double v) {
        if (!(peak > 0.0)) {
            return 0.0;
        }
        const double t = std::min(1.0, std::abs(v) / peak);
        return config.log_scale ? std::log10(1.0 + 9.0 * t) : t;
    };
    auto channel = [](double v) { return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0))); };

    for (std::size_t o = 0; o < rows; ++o) {
        for (std::size_t i = 0; i < cols; ++i) {
            const double v = matrix(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i));
            std::array<std::uint8_t, 3> rgb{};
            if (config.signed_map) {
                const double t = level(v);
                const std::uint8_t fade = channel(1.0 - t);
                rgb = v >= 0.0 ? std::array<std::uint8_t, 3>{fade, fade, 255} : std::array<std::uint8_t, 3>{255, fade, fade};
            } else {
                const double t = v > 0.0 ? level(v) : 0.0;
                rgb = {channel(3.0 * t), channel(3.0 * t - 1.0), channel(3.0 * t - 2.0)};
            }
            const HeatmapPixel p = heatmap_pixel(rows, o, i, config.cell);
            for (std::size_t dy = 0; dy < config.cell; ++dy) {
                for (std::size_t dx = 0; dx < config.cell; ++dx) {
                    std::copy(rgb.begin(), rgb.end(), img.at(p.x + dx, p.y + dy));
                }
            }
        }
    }
    return img;
}

} // namespace fluoro
