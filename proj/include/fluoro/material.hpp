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
#include "fluoro/basis.hpp"
#include "fluoro/rerad.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fluoro {

inline constexpr std::size_t kMaxLobes = 4;
inline constexpr double kMinMeanNm = 300.0;
inline constexpr double kMaxMeanNm = 800.0;
inline constexpr double kMinSpreadNm = 1.0;
inline constexpr double kMaxSpreadNm = 1000.0;

/// Diffuse fluorescent material: an XYZ albedo for the reflectance diagonal
/// and Q Gaussian lobes of normalized fluorescence. Fitted materials may
/// carry an explicit diagonal model, which then replaces the albedo when
/// building spectra and reduced reflectance.
struct FluorescentMaterial {
    Eigen::Vector3d albedo_xyz = Eigen::Vector3d::Zero();
    std::vector<FluoLobe> lobes{FluoLobe{}};
    std::optional<DiagonalModel> diagonal;
    std::string notes;
};

struct FieldError {
    std::string field; // JSON path, e.g. "gaussians[0].mu_e_nm"
    std::string message;
};

/// Field ranges, plus sum of alpha_bar <= 1 so that every row of the
/// recomposed matrix stays energy conserving.
std::vector<FieldError> validate(const FluorescentMaterial& m);

/// Throws DataError listing every field error.
void check(const FluorescentMaterial& m);

/// {albedo_xyz:[x,y,z], gaussians:[{alpha_bar, mu_a_nm, sigma_a_nm, mu_e_nm,
/// sigma_e_nm}], notes, diagonal_gaussians?:[{amplitude, mean_nm, std_nm}]}
nlohmann::json to_json(const FluorescentMaterial& m);
FluorescentMaterial material_from_json(const nlohmann::json& j); // validates
FluorescentMaterial read_material(const std::filesystem::path& path);
void write_material(const std::filesystem::path& path, const FluorescentMaterial& m);

nlohmann::json to_json(const ReducedRerad& r);

/// Albedo colour in the channels of `basis`: unchanged for K = 3, lifted
/// through T_U = S^T W S~_XYZ for XYZU bases.
Eigen::VectorXd albedo_in_basis(const Eigen::Vector3d& albedo_xyz, const SensitivityBasis& basis);

struct MaterialReduction {
    ReducedRerad reflectance;  // R
    ReducedRerad fluorescence; // normalized Fbar
    ReducedRerad total;        // R + Fbar (I - R)
};

/// Analytic path: closed-form Fbar; R from the diagonal model when present,
/// otherwise from the albedo via the per-channel R_k.
MaterialReduction reduce_material(const FluorescentMaterial& m, const SensitivityBasis& basis);

/// Reflectance spectrum of the material: the diagonal model if present,
/// else the albedo upsampled through the XYZ duals. Clamped to [0, 1].
Spectrum material_reflectance(const FluorescentMaterial& m, const WavelengthGrid& grid);

/// Full spectral matrix P = R + Fbar (I - R) on `grid`.
SpectralReradMatrix material_spectral(const FluorescentMaterial& m, const WavelengthGrid& grid);

} // namespace fluoro
