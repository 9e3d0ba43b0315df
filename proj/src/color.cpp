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


#include "fluoro/color.hpp"

#include "fluoro/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluoro {

namespace {

double lab_f(double t) {
    constexpr double d = 6.0 / 29.0;
    if (t > d * d * d) {
        return std::cbrt(t);
    }
    return t / (3.0 * d * d) + 4.0 / 29.0;
}

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double rad(double deg) { return deg * std::numbers::pi / 180.0; }

double hue_angle(double b, double a) {
    if (a == 0.0 && b == 0.0) {
        return 0.0;
    }
    double h = deg(std::atan2(b, a));
    return h < 0.0 ? h + 360.0 : h;
}

} // namespace

Lab xyz_to_lab(const Eigen::Vector3d& xyz, const Eigen::Vector3d& white) {
    if (!(white.minCoeff() > 0.0)) {
        throw std::invalid_argument("Lab white point must be positive");
    }
    const double fx = lab_f(xyz.x() / white.x());
    const double fy = lab_f(xyz.y() / white.y());
    const double fz = lab_f(xyz.z() / white.z());
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double delta_e2000(const Lab& lab1, const Lab& lab2) {
    const double c1 = std::hypot(lab1.a, lab1.b);
    const double c2 = std::hypot(lab2.a, lab2.b);
    const double c_mean = 0.5 * (c1 + c2);
    const double c7 = std::pow(c_mean, 7.0);
    const double g = 0.5 * (1.0 - std::sqrt(c7 / (c7 + std::pow(25.0, 7.0))));

    const double a1p = (1.0 + g) * lab1.a;
    const double a2p = (1.0 + g) * lab2.a;
    const double c1p = std::hypot(a1p, lab1.b);
    const double c2p = std::hypot(a2p, lab2.b);
    const double h1p = hue_angle(lab1.b, a1p);
    const double h2p = hue_angle(lab2.b, a2p);

    const double dL = lab2.L - lab1.L;
    const double dC = c2p - c1p;
    double dh = 0.0;
    if (c1p * c2p != 0.0) {
        dh = h2p - h1p;
        if (dh > 180.0) {
            dh -= 360.0;
        } else if (dh < -180.0) {
            dh += 360.0;
        }
    }
    const double dH = 2.0 * std::sqrt(c1p * c2p) * std::sin(rad(dh / 2.0));

    const double L_mean = 0.5 * (lab1.L + lab2.L);
    const double cp_mean = 0.5 * (c1p + c2p);
    double hp_mean = h1p + h2p;
    if (c1p * c2p != 0.0) {
        if (std::abs(h1p - h2p) <= 180.0) {
            hp_mean *= 0.5;
        } else if (h1p + h2p < 360.0) {
            hp_mean = 0.5 * (h1p + h2p + 360.0);
        } else {
            hp_mean = 0.5 * (h1p + h2p - 360.0);
        }
    }

    const double t = 1.0 - 0.17 * std::cos(rad(hp_mean - 30.0)) + 0.24 * std::cos(rad(2.0 * hp_mean)) +
                     0.32 * std::cos(rad(3.0 * hp_mean + 6.0)) - 0.20 * std::cos(rad(4.0 * hp_mean - 63.0));
    const double d_theta = 30.0 * std::exp(-std::pow((hp_mean - 275.0) / 25.0, 2.0));
    const double cp7 = std::pow(cp_mean, 7.0);
    const double rc = 2.0 * std::sqrt(cp7 / (cp7 + std::pow(25.0, 7.0)));
    const double l50 = (L_mean - 50.0) * (L_mean - 50.0);
    const double sl = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
    const double sc = 1.0 + 0.045 * cp_mean;
    const double sh = 1.0 + 0.015 * cp_mean * t;
    const double rt = -std::sin(rad(2.0 * d_theta)) * rc;

    const double tl = dL / sl;
    const double tc = dC / sc;
    const double th = dH / sh;
    return std::sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

double delta_e2000(const Eigen::Vector3d& xyz1, const Eigen::Vector3d& xyz2, const Eigen::Vector3d& white) {
    return delta_e2000(xyz_to_lab(xyz1, white), xyz_to_lab(xyz2, white));
}

Eigen::Matrix<double, 3, 4> xyzu_to_xyz() {
    Eigen::Matrix<double, 3, 4> t = Eigen::Matrix<double, 3, 4>::Zero();
    t.leftCols<3>().setIdentity();
    return t;
}

Eigen::Matrix<double, 4, 3> published_T_U() {
    Eigen::Matrix<double, 4, 3> t;
    t << 1.0, 0.0, 0.0,
         0.0, 1.0, 0.0,
         0.0, 0.0, 1.0,
         -0.0145415, 0.0267372, 0.397627;
    return t;
}

Eigen::MatrixXd compute_T_U(const SensitivityBasis& xyzu, const SensitivityBasis& xyz) {
    if (!(xyzu.grid() == xyz.grid())) {
        throw DataError("compute_T_U: bases are on different grids");
    }
    const auto n = static_cast<Eigen::Index>(xyz.grid().size());
    const Eigen::Map<const Eigen::VectorXd> w(xyz.grid().weights().data(), n);
    return xyzu.S().transpose() * w.asDiagonal() * xyz.S_dual();
}

Eigen::Vector4d lift_albedo_U(const Eigen::Vector3d& rho_xyz) { return published_T_U() * rho_xyz; }

Eigen::Vector4d lift_albedo_U(const Eigen::Vector3d& rho_xyz, const Eigen::MatrixXd& T_U) {
    if (T_U.rows() != 4 || T_U.cols() != 3) {
        throw std::invalid_argument("T_U must be 4 x 3");
    }
    return T_U * rho_xyz;
}

Eigen::VectorXd illuminant_to_color(const Spectrum& light, const SensitivityBasis& basis) {
    if (!(light.grid() == basis.grid())) {
        throw DataError("illuminant grid does not match basis grid");
    }
    return basis.project(light.values());
}

ReducedRerad albedo_to_reduced_R(const Eigen::VectorXd& rho, const SensitivityBasis& basis) {
    const auto k = static_cast<Eigen::Index>(basis.channels());
    if (rho.size() != k) {
        throw std::invalid_argument("albedo has " + std::to_string(rho.size()) + " channels, basis has " +
                                    std::to_string(k));
    }
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(k, k);
    const auto& rk = basis.albedo_reflectance_matrices();
    for (Eigen::Index c = 0; c < k; ++c) {
        r += rho(c) * rk[static_cast<std::size_t>(c)];
    }
    return {r, basis.labels()};
}

Eigen::Matrix3d xyz_to_linear_srgb() {
    Eigen::Matrix3d m;
    m << 3.2404542, -1.5371385, -0.4985314,
         -0.9692660, 1.8760108, 0.0415560,
         0.0556434, -0.2040259, 1.0572252;
    return m;
}

double srgb_encode(double linear) {
    if (linear <= 0.0031308) {
        return 12.92 * linear;
    }
    return 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

DisplayColor xyz_to_srgb_display(const Eigen::Vector3d& xyz, double exposure) {
    const Eigen::Vector3d rgb = xyz_to_linear_srgb() * (exposure * xyz);
    DisplayColor out;
    for (int c = 0; c < 3; ++c) {
        double v = rgb(c);
        // tolerance keeps an exact white from counting as clipped
        if (v < -1e-6 || v > 1.0 + 1e-6 || !std::isfinite(v)) {
            out.clipped = true;
        }
        v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        out.rgb[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(std::lround(255.0 * srgb_encode(v)));
    }
    return out;
}

} // namespace fluoro
