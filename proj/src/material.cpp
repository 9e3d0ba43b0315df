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


#include "fluoro/material.hpp"

#include "fluoro/color.hpp"
#include "fluoro/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace fluoro {

using nlohmann::json;

namespace {

void check_range(std::vector<FieldError>& errs, const std::string& field, double v, double lo, double hi) {
    if (!std::isfinite(v) || v < lo || v > hi) {
        std::ostringstream msg;
        msg << "must lie in [" << lo << ", " << hi << "], got " << v;
        errs.push_back({field, msg.str()});
    }
}

// Channel-reduced XYZ counterpart of an XYZU basis: same grid, all atoms but
// the last, first three transfer columns.
Eigen::MatrixXd cached_T_U(const SensitivityBasis& basis) {
    static std::mutex mutex;
    static std::map<std::string, Eigen::MatrixXd> cache;
    const std::string key = basis.hash();
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    Eigen::MatrixXd t_u;
    if (basis.is_gaussian()) {
        const auto m = static_cast<Eigen::Index>(basis.atoms().size());
        std::vector<Gaussian1D> atoms(basis.atoms().begin(), basis.atoms().end() - 1);
        const SensitivityBasis xyz =
            build_basis(atoms, basis.transfer().topLeftCorner(m - 1, 3), basis.grid(), {"X", "Y", "Z"});
        t_u = compute_T_U(basis, xyz);
    } else {
        const SensitivityBasis xyz = tabulated_basis(basis.S().leftCols(3), basis.grid(), {"X", "Y", "Z"});
        t_u = compute_T_U(basis, xyz);
    }
    std::lock_guard lock(mutex);
    cache.emplace(key, t_u);
    return t_u;
}

} // namespace

std::vector<FieldError> validate(const FluorescentMaterial& m) {
    std::vector<FieldError> errs;
    for (int c = 0; c < 3; ++c) {
        check_range(errs, "albedo_xyz[" + std::to_string(c) + "]", m.albedo_xyz(c), 0.0, 1.0);
    }
    if (m.lobes.empty() || m.lobes.size() > kMaxLobes) {
        errs.push_back({"gaussians", "needs between 1 and " + std::to_string(kMaxLobes) + " entries"});
    }
    for (std::size_t q = 0; q < m.lobes.size(); ++q) {
        const auto& l = m.lobes[q];
        const std::string p = "gaussians[" + std::to_string(q) + "].";
        check_range(errs, p + "alpha_bar", l.alpha_bar, 0.0, 1.0);
        check_range(errs, p + "mu_a_nm", l.mu_a, kMinMeanNm, kMaxMeanNm);
        check_range(errs, p + "sigma_a_nm", l.sigma_a, kMinSpreadNm, kMaxSpreadNm);
        check_range(errs, p + "mu_e_nm", l.mu_e, kMinMeanNm, kMaxMeanNm);
        check_range(errs, p + "sigma_e_nm", l.sigma_e, kMinSpreadNm, kMaxSpreadNm);
    }
    double strength = 0.0;
    for (const auto& l : m.lobes) {
        strength += l.alpha_bar;
    }
    if (strength > 1.0 + 1e-9) {
        errs.push_back({"gaussians", "alpha_bar values must sum to at most 1"});
    }
    if (m.diagonal) {
        if (m.diagonal->gaussians.size() > 6) {
            errs.push_back({"diagonal_gaussians", "at most 6 entries"});
        }
        for (std::size_t i = 0; i < m.diagonal->gaussians.size(); ++i) {
            const auto& g = m.diagonal->gaussians[i];
            const std::string p = "diagonal_gaussians[" + std::to_string(i) + "].";
            check_range(errs, p + "amplitude", g.amplitude, 0.0, 1e3);
            check_range(errs, p + "std_nm", g.std, 1e-3, 1e4);
            if (!std::isfinite(g.mean)) {
                errs.push_back({p + "mean_nm", "must be finite"});
            }
        }
    }
    return errs;
}

void check(const FluorescentMaterial& m) {
    const auto errs = validate(m);
    if (errs.empty()) {
        return;
    }
    std::string msg = "invalid material:";
    for (const auto& e : errs) {
        msg += " " + e.field + " " + e.message + ";";
    }
    throw DataError(msg);
}

json to_json(const FluorescentMaterial& m) {
    json j;
    j["albedo_xyz"] = {m.albedo_xyz(0), m.albedo_xyz(1), m.albedo_xyz(2)};
    j["gaussians"] = json::array();
    for (const auto& l : m.lobes) {
        j["gaussians"].push_back({{"alpha_bar", l.alpha_bar},
                                  {"mu_a_nm", l.mu_a},
                                  {"sigma_a_nm", l.sigma_a},
                                  {"mu_e_nm", l.mu_e},
                                  {"sigma_e_nm", l.sigma_e}});
    }
    j["notes"] = m.notes;
    if (m.diagonal) {
        j["diagonal_gaussians"] = json::array();
        for (const auto& g : m.diagonal->gaussians) {
            j["diagonal_gaussians"].push_back({{"amplitude", g.amplitude}, {"mean_nm", g.mean}, {"std_nm", g.std}});
        }
    }
    return j;
}

FluorescentMaterial material_from_json(const json& j) {
    FluorescentMaterial m;
    try {
        const auto& a = j.at("albedo_xyz");
        if (!a.is_array() || a.size() != 3) {
            throw DataError("material: albedo_xyz must have 3 entries");
        }
        for (int c = 0; c < 3; ++c) {
            m.albedo_xyz(c) = a.at(static_cast<std::size_t>(c)).get<double>();
        }
        m.lobes.clear();
        for (const auto& g : j.at("gaussians")) {
            m.lobes.push_back({g.value("alpha_bar", 1.0), g.at("mu_a_nm").get<double>(), g.at("sigma_a_nm").get<double>(),
                               g.at("mu_e_nm").get<double>(), g.at("sigma_e_nm").get<double>()});
        }
        m.notes = j.value("notes", std::string());
        if (j.contains("diagonal_gaussians")) {
            DiagonalModel d;
            for (const auto& g : j.at("diagonal_gaussians")) {
                d.gaussians.push_back(
                    {g.at("amplitude").get<double>(), g.at("mean_nm").get<double>(), g.at("std_nm").get<double>()});
            }
            m.diagonal = std::move(d);
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("material: ") + e.what());
    }
    check(m);
    return m;
}

FluorescentMaterial read_material(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open material " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return material_from_json(j);
}

void write_material(const std::filesystem::path& path, const FluorescentMaterial& m) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << to_json(m).dump(2) << '\n';
}

json to_json(const ReducedRerad& r) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < r.m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < r.m.cols(); ++k) {
            row.push_back(r.m(i, k));
        }
        rows.push_back(row);
    }
    return {{"labels", r.labels}, {"matrix", rows}};
}

Eigen::VectorXd albedo_in_basis(const Eigen::Vector3d& albedo_xyz, const SensitivityBasis& basis) {
    if (basis.channels() == 3) {
        return albedo_xyz;
    }
    if (basis.channels() == 4) {
        return cached_T_U(basis) * albedo_xyz;
    }
    throw std::invalid_argument("albedo lift needs a 3 or 4 channel basis");
}

MaterialReduction reduce_material(const FluorescentMaterial& m, const SensitivityBasis& basis) {
    ReducedRerad r = m.diagonal ? reduce_diagonal_analytic(*m.diagonal, basis)
                                : albedo_to_reduced_R(albedo_in_basis(m.albedo_xyz, basis), basis);
    ReducedRerad f = reduce_fluorescence(std::span<const FluoLobe>(m.lobes), basis);
    ReducedRerad p = compose_reduced(r, f);
    return {std::move(r), std::move(f), std::move(p)};
}

Spectrum material_reflectance(const FluorescentMaterial& m, const WavelengthGrid& grid) {
    Spectrum rho(grid);
    if (m.diagonal) {
        rho = discretize_diagonal(*m.diagonal, grid);
    } else {
        const SensitivityBasis xyz = xyz_basis(grid);
        const Eigen::VectorXd v = xyz.S_dual() * m.albedo_xyz / xyz.albedo_scale();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            rho[i] = v(static_cast<Eigen::Index>(i));
        }
    }
    for (auto& v : rho.values()) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return rho;
}

SpectralReradMatrix material_spectral(const FluorescentMaterial& m, const WavelengthGrid& grid) {
    DecomposedRerad d{material_reflectance(m, grid), {}, 0};
    const auto lobes = resolve_lobes(m.lobes);
    d.fbar = discretize_fbar(lobes, grid);
    return recompose(d);
}

} // namespace fluoro
