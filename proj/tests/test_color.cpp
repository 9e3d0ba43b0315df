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
#include "fluoro/illuminants.hpp"
#include "fluoro/palette.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <random>

using namespace fluoro;

namespace {

Eigen::MatrixXd weights(const WavelengthGrid& g) {
    return Eigen::Map<const Eigen::VectorXd>(g.weights().data(), static_cast<Eigen::Index>(g.size())).asDiagonal();
}

} // namespace

TEST_CASE("CIEDE2000 reference pairs") {
    double worst = 0.0;
    for (const auto& r : oracle::kCiede2000Pairs) {
        const double de = delta_e2000(Lab{r[0], r[1], r[2]}, Lab{r[3], r[4], r[5]});
        worst = std::max(worst, std::abs(de - r[6]));
        CHECK(std::abs(de - r[6]) <= 1e-4);
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("CIEDE2000 basic properties") {
    const Lab a{50, 10, -20};
    const Lab b{55, -3, 7};
    CHECK(delta_e2000(a, a) == 0.0);
    CHECK(delta_e2000(a, b) == delta_e2000(b, a));
    const Eigen::Vector3d white(0.95, 1.0, 1.09);
    CHECK(delta_e2000(Eigen::Vector3d(0.3, 0.2, 0.1), Eigen::Vector3d(0.3, 0.2, 0.1), white) == 0.0);
    CHECK_THROWS_AS(xyz_to_lab({0.1, 0.1, 0.1}, {0.0, 1.0, 1.0}), std::invalid_argument);
    const Lab w = xyz_to_lab(white, white);
    CHECK(w.L == doctest::Approx(100.0));
    CHECK(std::abs(w.a) < 1e-12);
    CHECK(std::abs(w.b) < 1e-12);
}

TEST_CASE("U channel transfer") {
    const SensitivityBasis xyzu = xyzu_basis();
    const SensitivityBasis xyz = xyz_basis();
    const Eigen::MatrixXd t = compute_T_U(xyzu, xyz);
    REQUIRE(t.rows() == 4);
    REQUIRE(t.cols() == 3);
    CHECK((t.topRows(3) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-6);
    const Eigen::RowVector3d published(-0.0145, 0.0267, 0.3976);
    CHECK((t.row(3) - published).cwiseAbs().maxCoeff() <= 5e-4);
    CHECK((published_T_U().row(3) - published).cwiseAbs().maxCoeff() <= 5e-4);

    // Dual and primal swapped gives a different matrix.
    const Eigen::MatrixXd swapped = xyzu.S_dual().transpose() * weights(xyzu.grid()) * xyz.S();
    CHECK((swapped - t).cwiseAbs().maxCoeff() > 1e-2);
}

TEST_CASE("albedo lift") {
    CHECK(lift_albedo_U({1, 1, 1})(3) == doctest::Approx(0.4098227).epsilon(1e-7));
    CHECK(lift_albedo_U({0, 0, 0}).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::Vector4d z = lift_albedo_U({0, 0, 1});
    CHECK(z(3) == doctest::Approx(0.397627));
    CHECK(z.head<3>() == Eigen::Vector3d(0, 0, 1));
    CHECK((xyzu_to_xyz() * z - Eigen::Vector3d(0, 0, 1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("illuminant colour") {
    const SensitivityBasis b = xyzu_basis();
    const auto& g = b.grid();
    CHECK(illuminant_to_color(Spectrum(g), b).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::Vector4d c(0.3, 1.2, -0.4, 0.8);
    const Eigen::VectorXd l = b.S_dual() * c;
    const Spectrum light(g, std::vector<double>(l.data(), l.data() + l.size()));
    CHECK((illuminant_to_color(light, b) - c).cwiseAbs().maxCoeff() <= 1e-6);

    const IlluminantRegistry reg(g);
    const SensitivityBasis xyz = xyz_basis(g);
    const Spectrum& d65 = reg.get("D65").spd;
    const auto w = oracle::trapezoid_weights(g.samples());
    const Eigen::VectorXd got = illuminant_to_color(d65, xyz);
    for (Eigen::Index k = 0; k < 3; ++k) {
        double ref = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            ref += w[i] * xyz.S()(static_cast<Eigen::Index>(i), k) * d65[i];
        }
        CHECK(got(k) == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK((reg.color("D65", xyz) - got).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("albedo reflectance matrices") {
    const SensitivityBasis b = xyzu_basis(make_grid(300, 800, 5));
    CHECK(albedo_to_reduced_R(Eigen::VectorXd::Zero(4), b).m.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(albedo_to_reduced_R(Eigen::VectorXd::Zero(3), b), std::invalid_argument);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0, 1);
    const Eigen::Vector4d albedo(u(rng), u(rng), u(rng), u(rng));
    const Eigen::VectorXd rho = b.S_dual() * albedo / b.albedo_scale();
    const std::size_t n = b.grid().size();
    std::vector<double> diag(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i * n + i] = rho(static_cast<Eigen::Index>(i));
    }
    const Eigen::MatrixXd ref = oracle::reduce_dense(diag, b.grid(), b.S(), b.S_dual());
    CHECK((albedo_to_reduced_R(albedo, b).m - ref).cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(4, 4);
    for (const auto& r : b.albedo_reflectance_matrices()) {
        sum += r;
    }
    CHECK((albedo_to_reduced_R(Eigen::VectorXd::Ones(4), b).m - sum).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("display encoding") {
    const DisplayColor black = xyz_to_srgb_display(Eigen::Vector3d::Zero(), 1.0);
    CHECK(black.rgb == std::array<std::uint8_t, 3>{0, 0, 0});
    CHECK_FALSE(black.clipped);

    const DisplayColor white = xyz_to_srgb_display({0.95047, 1.0, 1.08883}, 1.0);
    CHECK(white.rgb == std::array<std::uint8_t, 3>{255, 255, 255});
    CHECK_FALSE(white.clipped);

    const DisplayColor hot = xyz_to_srgb_display({0.2, 0.6, 0.05}, 1.0);
    CHECK(hot.clipped);

    // D65 through the reduction basis, normalized to Y = 1, is displayed as near white.
    const IlluminantRegistry reg;
    const SensitivityBasis b = xyzu_basis();
    const Eigen::Vector3d d65 = reg.color("D65", b).head<3>();
    const DisplayColor dw = xyz_to_srgb_display(d65, display_normalization(reg, b));
    for (auto v : dw.rgb) {
        CHECK(v >= 245);
    }

    // Doubling exposure doubles linear values before encoding.
    const Eigen::Vector3d grey(0.05, 0.05, 0.05);
    const Eigen::Vector3d lin = xyz_to_linear_srgb() * grey;
    const DisplayColor d2 = xyz_to_srgb_display(grey, 2.0);
    for (int c = 0; c < 3; ++c) {
        CHECK(d2.rgb[static_cast<std::size_t>(c)] == std::lround(255 * srgb_encode(2 * lin(c))));
    }
    CHECK(srgb_encode(0.0) == 0.0);
    CHECK(srgb_encode(1.0) == doctest::Approx(1.0));
}
