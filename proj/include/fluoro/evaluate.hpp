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
#include "fluoro/material.hpp"
#include "fluoro/rerad.hpp"

#include <json.hpp>

#include <functional>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fluoro {

/// Box-plot summary. `median` is the centre line; whiskers are min and max.
struct BoxStats {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

/// Quartiles by linear interpolation between order statistics. Throws on
/// empty input.
BoxStats box_stats(std::vector<double> values);

enum class EvalPath {
    spectral_fit,     // fitted model rebuilt as a spectral matrix
    reduced_brute,    // quadrature reduction of the measured matrix
    reduced_analytic, // closed-form reduction of the fitted model
};

EvalPath parse_eval_path(const std::string& name);
std::string to_string(EvalPath path);

struct EvalReport {
    std::string path;
    std::vector<std::string> illuminants;
    std::map<std::string, BoxStats> per_illuminant;
    std::vector<std::vector<double>> per_material; // [material][illuminant]
    BoxStats overall;
};

nlohmann::json to_json(const EvalReport& report);

/// XYZ of a material under an illuminant.
using ColorFn = std::function<Eigen::Vector3d(std::size_t material, const std::string& illuminant)>;

/// Generic harness: CIEDE2000 between two colour paths per material and
/// illuminant. Each illuminant's white is `white(illuminant)`.
EvalReport evaluate_colors(const ColorFn& reference, const ColorFn& approx,
                           const std::function<Eigen::Vector3d(const std::string&)>& white, std::size_t materials,
                           const std::vector<std::string>& illuminants, const std::string& label);

struct EvalSetup {
    const IlluminantRegistry* registry = nullptr;
    std::vector<std::string> illuminants;
    const SensitivityBasis* sensors = nullptr; // reference XYZ sensors (spectral path)
    const SensitivityBasis* basis = nullptr;   // reduction basis (XYZ or XYZU)
};

/// Reference: the spectral path on `dataset`. Approximation: `path`, using
/// `models` for the fitted paths (ignored by reduced_brute).
EvalReport evaluate_dE(const std::vector<SpectralReradMatrix>& dataset, const std::vector<FluorescentMaterial>& models,
                       const EvalSetup& setup, EvalPath path);

struct UvSearch {
    std::vector<double> means{};
    std::vector<double> spreads{};
};

struct UvSearchResult {
    Gaussian1D uv;
    double objective = 0.0;
    bool degenerate = false; // objective flat; default UV band returned
    std::vector<std::array<double, 3>> samples; // (mean, std, objective)
};

/// Grid search over the UV atom minimizing the mean CIEDE2000 between the
/// spectral path and the quadrature-reduced XYZU path.
UvSearchResult optimize_uv_basis(const std::vector<SpectralReradMatrix>& dataset, const EvalSetup& setup,
                                 const UvSearch& search);

} // namespace fluoro
