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


#include "fluoro/evaluate.hpp"

#include "fluoro/color.hpp"
#include "fluoro/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fluoro {

using nlohmann::json;

namespace {

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

json stats_json(const BoxStats& s) {
    return {{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"mean", s.mean},
            {"q3", s.q3},   {"max", s.max}, {"count", s.count}};
}

Eigen::Vector3d first3(const Eigen::VectorXd& v) { return v.head<3>(); }

void require_setup(const EvalSetup& setup) {
    if (!setup.registry || !setup.sensors || !setup.basis) {
        throw std::invalid_argument("evaluation setup is incomplete");
    }
    if (setup.illuminants.empty()) {
        throw std::invalid_argument("evaluation needs at least one illuminant");
    }
}

} // namespace

BoxStats box_stats(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("box_stats of an empty sample");
    }
    std::sort(values.begin(), values.end());
    BoxStats s;
    s.count = values.size();
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    // sorted summation keeps the mean independent of input order
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return s;
}

EvalPath parse_eval_path(const std::string& name) {
    if (name == "spectral" || name == "spectral-fit" || name == "fit") {
        return EvalPath::spectral_fit;
    }
    if (name == "brute" || name == "reduced-brute") {
        return EvalPath::reduced_brute;
    }
    if (name == "analytic" || name == "reduced-analytic") {
        return EvalPath::reduced_analytic;
    }
    throw std::invalid_argument("unknown evaluation path '" + name + "' (spectral, brute, analytic)");
}

std::string to_string(EvalPath path) {
    switch (path) {
    case EvalPath::spectral_fit:
        return "spectral-fit";
    case EvalPath::reduced_brute:
        return "reduced-brute";
    case EvalPath::reduced_analytic:
        return "reduced-analytic";
    }
    return "?";
}

json to_json(const EvalReport& report) {
    json j;
    j["path"] = report.path;
    j["illuminants"] = report.illuminants;
    j["overall"] = stats_json(report.overall);
    for (const auto& [name, s] : report.per_illuminant) {
        j["per_illuminant"][name] = stats_json(s);
    }
    j["per_material"] = report.per_material;
    return j;
}

EvalReport evaluate_colors(const ColorFn& reference, const ColorFn& approx,
                           const std::function<Eigen::Vector3d(const std::string&)>& white, std::size_t materials,
                           const std::vector<std::string>& illuminants, const std::string& label) {
    if (materials == 0) {
        throw DataError("evaluation dataset is empty");
    }
    EvalReport report;
    report.path = label;
    report.illuminants = illuminants;
    report.per_material.assign(materials, std::vector<double>(illuminants.size(), 0.0));
    std::vector<double> all;
    for (std::size_t l = 0; l < illuminants.size(); ++l) {
        const Eigen::Vector3d w = white(illuminants[l]);
        std::vector<double> column;
        for (std::size_t m = 0; m < materials; ++m) {
            const double de = delta_e2000(reference(m, illuminants[l]), approx(m, illuminants[l]), w);
            report.per_material[m][l] = de;
            column.push_back(de);
            all.push_back(de);
        }
        report.per_illuminant[illuminants[l]] = box_stats(std::move(column));
    }
    report.overall = box_stats(std::move(all));
    return report;
}

EvalReport evaluate_dE(const std::vector<SpectralReradMatrix>& dataset, const std::vector<FluorescentMaterial>& models,
                       const EvalSetup& setup, EvalPath path) {
    require_setup(setup);
    if (path != EvalPath::reduced_brute && models.size() != dataset.size()) {
        throw std::invalid_argument("evaluation needs one model per dataset entry");
    }
    const auto& reg = *setup.registry;
    const auto& sensors = *setup.sensors;
    const auto& basis = *setup.basis;

    auto reference = [&](std::size_t m, const std::string& l) {
        return first3(outgoing_color_spectral(dataset[m], reg.get(l).spd, sensors));
    };
    auto white = [&](const std::string& l) { return first3(reg.color(l, sensors)); };

    // Per-material matrices are computed once, not per illuminant.
    std::vector<SpectralReradMatrix> spectral;
    std::vector<ReducedRerad> reduced;
    for (std::size_t m = 0; m < dataset.size(); ++m) {
        switch (path) {
        case EvalPath::spectral_fit:
            spectral.push_back(material_spectral(models[m], dataset[m].grid()));
            break;
        case EvalPath::reduced_brute:
            reduced.push_back(reduce_matrix(dataset[m], basis));
            break;
        case EvalPath::reduced_analytic:
            reduced.push_back(reduce_material(models[m], basis).total);
            break;
        }
    }
    ColorFn approx;
    if (path == EvalPath::spectral_fit) {
        approx = [&](std::size_t m, const std::string& l) {
            return first3(outgoing_color_spectral(spectral[m], reg.get(l).spd, sensors));
        };
    } else {
        approx = [&](std::size_t m, const std::string& l) {
            return first3(apply_reduced(reduced[m], reg.color(l, basis)));
        };
    }
    return evaluate_colors(reference, approx, white, dataset.size(), setup.illuminants, to_string(path));
}

UvSearchResult optimize_uv_basis(const std::vector<SpectralReradMatrix>& dataset, const EvalSetup& setup,
                                 const UvSearch& search) {
    if (dataset.empty()) {
        throw DataError("UV basis search needs a non-empty dataset");
    }
    if (!setup.registry || !setup.sensors || setup.illuminants.empty()) {
        throw std::invalid_argument("UV basis search setup is incomplete");
    }
    if (search.means.empty() || search.spreads.empty()) {
        throw std::invalid_argument("UV basis search grid is empty");
    }
    const auto& grid = dataset.front().grid();
    const auto& reg = *setup.registry;

    UvSearchResult out;
    out.uv = xyzu_atoms::kUV;
    const bool fluorescent = std::any_of(dataset.begin(), dataset.end(), [](const SpectralReradMatrix& p) {
        for (std::size_t o = 0; o < p.size(); ++o) {
            for (std::size_t i = 0; i < o; ++i) {
                if (p.at(o, i) != 0.0) {
                    return true;
                }
            }
        }
        return false;
    });
    if (!fluorescent) {
        out.degenerate = true;
        return out;
    }

    std::vector<std::vector<Eigen::Vector3d>> ref(dataset.size());
    for (std::size_t m = 0; m < dataset.size(); ++m) {
        for (const auto& l : setup.illuminants) {
            ref[m].push_back(first3(outgoing_color_spectral(dataset[m], reg.get(l).spd, *setup.sensors)));
        }
    }
    std::vector<Eigen::Vector3d> whites;
    for (const auto& l : setup.illuminants) {
        whites.push_back(first3(reg.color(l, *setup.sensors)));
    }

    double best = std::numeric_limits<double>::infinity();
    double worst = -best;
    for (const double mu : search.means) {
        for (const double sigma : search.spreads) {
            const SensitivityBasis basis = xyzu_basis(grid, {1.0, mu, sigma});
            double sum = 0.0;
            for (std::size_t m = 0; m < dataset.size(); ++m) {
                const ReducedRerad p = reduce_matrix(dataset[m], basis);
                for (std::size_t l = 0; l < setup.illuminants.size(); ++l) {
                    const Eigen::Vector3d c = first3(apply_reduced(p, reg.color(setup.illuminants[l], basis)));
                    sum += delta_e2000(ref[m][l], c, whites[l]);
                }
            }
            const double objective = sum / static_cast<double>(dataset.size() * setup.illuminants.size());
            out.samples.push_back({mu, sigma, objective});
            worst = std::max(worst, objective);
            if (objective < best) {
                best = objective;
                out.uv = {1.0, mu, sigma};
            }
        }
    }
    out.objective = best;
    if (worst - best <= 1e-9 * std::max(1.0, worst)) {
        out.uv = xyzu_atoms::kUV;
        out.degenerate = true;
    }
    return out;
}

} // namespace fluoro
