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
#include "fluoro/rerad.hpp"

#include <Eigen/Dense>
#include <array>
#include <cstdint>

namespace fluoro {

struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// CIE 1976 L*a*b* relative to `white`. Throws std::invalid_argument when the
/// white has non-positive components.
Lab xyz_to_lab(const Eigen::Vector3d& xyz, const Eigen::Vector3d& white);

/// CIEDE2000 with kL = kC = kH = 1.
double delta_e2000(const Lab& lab1, const Lab& lab2);

/// Convenience: both colours measured against the same white.
double delta_e2000(const Eigen::Vector3d& xyz1, const Eigen::Vector3d& xyz2, const Eigen::Vector3d& white);

/// T = [I3 | 0]: drops the U channel of an XYZU colour.
Eigen::Matrix<double, 3, 4> xyzu_to_xyz();

/// Published albedo lift XYZ -> XYZU. Rows 1-3 are the identity.
Eigen::Matrix<double, 4, 3> published_T_U();

/// T_U = S_XYZU^T W S~_XYZ for two bases on the same grid.
Eigen::MatrixXd compute_T_U(const SensitivityBasis& xyzu, const SensitivityBasis& xyz);

Eigen::Vector4d lift_albedo_U(const Eigen::Vector3d& rho_xyz);
Eigen::Vector4d lift_albedo_U(const Eigen::Vector3d& rho_xyz, const Eigen::MatrixXd& T_U);

/// c_i = S^T W L.
Eigen::VectorXd illuminant_to_color(const Spectrum& light, const SensitivityBasis& basis);

/// R_rho = sum_k rho_k R_k for an albedo colour with one entry per channel.
ReducedRerad albedo_to_reduced_R(const Eigen::VectorXd& rho, const SensitivityBasis& basis);

/// Linear sRGB (D65) from XYZ.
Eigen::Matrix3d xyz_to_linear_srgb();

double srgb_encode(double linear);

struct DisplayColor {
    std::array<std::uint8_t, 3> rgb{};
    bool clipped = false; // some channel fell outside [0, 1] before encoding
};

/// Scales by `exposure`, converts to linear sRGB, clips to [0, 1] and gamma
/// encodes to 8 bits.
DisplayColor xyz_to_srgb_display(const Eigen::Vector3d& xyz, double exposure);

} // namespace fluoro
