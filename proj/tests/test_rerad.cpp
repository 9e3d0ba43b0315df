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


#include "fluoro/analytic.hpp"
#include "fluoro/color.hpp"
#include "fluoro/error.hpp"
#include "fluoro/illuminants.hpp"
#include "fluoro/material.hpp"
#include "fluoro/rerad.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <iomanip>
#include <random>
#include <sstream>

using namespace fluoro;

namespace {

const WavelengthGrid& coarse() {
    static const WavelengthGrid g = make_grid(300, 800, 5);
    return g;
}

// Random valid (rho, fbar) pair on `grid`.
DecomposedRerad random_decomposed(std::mt19937_64& rng, const WavelengthGrid& grid) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = grid.size();
    DecomposedRerad d{Spectrum(grid), std::vector<double>(n * n, 0.0), 0};
    for (std::size_t i = 0; i < n; ++i) {
        d.rho[i] = 0.9 * u(rng);
        for (std::size_t o = i + 1; o < n; ++o) {
            d.fbar[o * n + i] = 1e-3 * u(rng);
        }
    }
    return d;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

} // namespace

TEST_CASE("strict matrix constructor") {
    const auto& g = coarse();
    const std::size_t n = g.size();
    std::vector<double> e(n * n, 0.0);
    e[0 * n + 3] = 0.1; // lambda_o < lambda_i
    CHECK_THROWS_AS(SpectralReradMatrix(g, e), DataError);
    e[0 * n + 3] = 0.0;
    e[5 * n + 5] = -0.1;
    CHECK_THROWS_AS(SpectralReradMatrix(g, e), DataError);
    CHECK_THROWS_AS(SpectralReradMatrix(g, std::vector<double>(7, 0.0)), std::invalid_argument);
}

TEST_CASE("decompose") {
    const auto& g = coarse();
    const std::size_t n = g.size();

    std::vector<double> diag(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i * n + i] = 0.4;
    }
    const DecomposedRerad d0 = decompose(SpectralReradMatrix(g, diag));
    CHECK(std::all_of(d0.fbar.begin(), d0.fbar.end(), [](double v) { return v == 0.0; }));
    CHECK(d0.rho[10] == 0.4);

    std::vector<double> one(n * n, 0.0);
    const std::size_t i400 = g.nearest_index(400);
    const std::size_t o600 = g.nearest_index(600);
    one[i400 * n + i400] = 0.5;
    one[o600 * n + i400] = 0.3;
    const DecomposedRerad d1 = decompose(SpectralReradMatrix(g, one));
    CHECK(d1.fbar_at(o600, i400) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("decompose and recompose are inverse") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const DecomposedRerad d = random_decomposed(rng, coarse());
        const SpectralReradMatrix p = recompose(d);
        const DecomposedRerad back = decompose(p);
        CHECK(max_abs_diff(back.rho.values(), d.rho.values()) <= 1e-12);
        CHECK(max_abs_diff(back.fbar, d.fbar) <= 1e-12);
        const SpectralReradMatrix again = recompose(back);
        CHECK(max_abs_diff(again.entries(), p.entries()) <= 1e-12);
    }
}

TEST_CASE("recompose special cases") {
    std::mt19937_64 rng(12);
    DecomposedRerad d = random_decomposed(rng, coarse());
    const std::size_t n = coarse().size();

    DecomposedRerad no_fluo{d.rho, std::vector<double>(n * n, 0.0), 0};
    const SpectralReradMatrix p1 = recompose(no_fluo);
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(p1.at(o, i) == (o == i ? d.rho[i] : 0.0));
        }
    }

    DecomposedRerad no_refl{Spectrum(coarse()), d.fbar, 0};
    const SpectralReradMatrix p2 = recompose(no_refl);
    CHECK(max_abs_diff(p2.entries(), d.fbar) == 0.0);
}

TEST_CASE("row energy") {
    const auto& g = coarse();
    const std::size_t n = g.size();
    std::vector<double> e(n * n, 0.0);
    e[3 * n + 3] = 0.25;
    for (std::size_t o = 4; o < n; ++o) {
        e[o * n + 3] = 0.001;
    }
    const SpectralReradMatrix p(g, e);
    const auto energy = p.row_energy();
    const auto w = oracle::trapezoid_weights(g.samples());
    double ref = 0.25 + 0.5 * w[3] * 0.001; // half a cell of the limit at the diagonal
    for (std::size_t o = 4; o < n; ++o) {
        ref += 0.001 * w[o];
    }
    CHECK(energy[3] == doctest::Approx(ref).epsilon(1e-14));
    // a constant density over [lambda_i, max] integrates exactly
    CHECK(energy[3] - 0.25 == doctest::Approx(0.001 * (g.max_nm() - g[3])).epsilon(1e-12));
    CHECK(energy[10] == 0.0);
}

TEST_CASE("reduction of simple matrices") {
    const auto basis = xyzu_basis();
    const std::size_t n = basis.grid().size();
    std::vector<double> ident(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        ident[i * n + i] = 1.0;
    }
    const ReducedRerad r = reduce_matrix(SpectralReradMatrix(basis.grid(), ident), basis);
    CHECK((r.m - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(r.labels == basis.labels());

    const ReducedRerad z = reduce_matrix(SpectralReradMatrix(basis.grid()), basis);
    CHECK(z.m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reduction against an independent dense sum") {
    const auto basis = xyzu_basis(coarse());
    std::mt19937_64 rng(13);
    const SpectralReradMatrix p = recompose(random_decomposed(rng, coarse()));
    const ReducedRerad r = reduce_matrix(p, basis);
    const Eigen::MatrixXd ref = oracle::reduce_dense(p.entries(), coarse(), basis.S(), basis.S_dual());
    CHECK((r.m - ref).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + ref.cwiseAbs().maxCoeff()));
}

TEST_CASE("reduction is linear") {
    const auto basis = xyzu_basis(coarse());
    std::mt19937_64 rng(14);
    const SpectralReradMatrix p = recompose(random_decomposed(rng, coarse()));
    const SpectralReradMatrix q = recompose(random_decomposed(rng, coarse()));
    const double a = 0.7;
    const double b = -1.3;
    std::vector<double> mix(p.entries().size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
        mix[i] = a * p.entries()[i] + b * q.entries()[i];
    }
    const Eigen::MatrixXd lhs = reduce_matrix(mix, coarse(), basis).m;
    const Eigen::MatrixXd rhs = a * reduce_matrix(p, basis).m + b * reduce_matrix(q, basis).m;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("apply and compose reduced matrices") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-1, 1);
    ReducedRerad p{Eigen::MatrixXd(4, 4), {"X", "Y", "Z", "U"}};
    for (Eigen::Index i = 0; i < 16; ++i) {
        p.m(i / 4, i % 4) = u(rng);
    }
    const Eigen::Vector4d c(u(rng), u(rng), u(rng), u(rng));
    CHECK(apply_reduced(p, Eigen::VectorXd::Zero(4)).cwiseAbs().maxCoeff() == 0.0);
    ReducedRerad ident{Eigen::MatrixXd::Identity(4, 4), p.labels};
    CHECK((apply_reduced(ident, c) - c).cwiseAbs().maxCoeff() == 0.0);
    Eigen::Vector4d ref = Eigen::Vector4d::Zero();
    for (int r = 0; r < 4; ++r) {
        for (int k = 0; k < 4; ++k) {
            ref(r) += p.m(r, k) * c(k);
        }
    }
    CHECK((apply_reduced(p, c) - ref).cwiseAbs().maxCoeff() < 1e-14);

    ReducedRerad zero{Eigen::MatrixXd::Zero(4, 4), p.labels};
    CHECK((compose_reduced(p, zero).m - p.m).cwiseAbs().maxCoeff() == 0.0);
    CHECK((compose_reduced(zero, p).m - p.m).cwiseAbs().maxCoeff() == 0.0);
    CHECK((compose_reduced(ident, p).m - ident.m).cwiseAbs().maxCoeff() == 0.0);

    const OutgoingSplit s = split_outgoing(ident, p, c);
    CHECK(s.fluorescent.cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.total() - c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectral colour of the identity under E is the CMF integral") {
    const auto grid = default_grid();
    const IlluminantRegistry reg(grid);
    const SensitivityBasis cmf = cie2006_basis(grid);
    const std::size_t n = grid.size();
    std::vector<double> ident(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        ident[i * n + i] = 1.0;
    }
    const Eigen::VectorXd xyz = outgoing_color_spectral(SpectralReradMatrix(grid, ident), reg.get("E").spd, cmf);
    const auto w = oracle::trapezoid_weights(grid.samples());
    int ch = 0;
    for (const char* name : {"x", "y", "z"}) {
        const Spectrum s = load_cmf(name, grid);
        double ref = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ref += w[i] * s[i];
        }
        CHECK(xyz(ch++) == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK(outgoing_color_spectral(SpectralReradMatrix(grid), reg.get("D65").spd, cmf).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("broadband light: spectral and reduced paths agree") {
    const auto grid = default_grid();
    const SensitivityBasis xyz = xyz_basis(grid);
    const SensitivityBasis xyzu = xyzu_basis(grid);
    const IlluminantRegistry reg(grid);
    FluorescentMaterial m;
    m.albedo_xyz = Eigen::Vector3d::Constant(0.2);
    m.lobes = {{0.8, 420, 25, 540, 30}};
    const SpectralReradMatrix p = material_spectral(m, grid);
    const MaterialReduction red = reduce_material(m, xyzu);
    for (const char* name : {"D65", "A", "E"}) {
        const Spectrum& light = reg.get(name).spd;
        const Eigen::Vector3d spectral = outgoing_color_spectral(p, light, xyz).head<3>();
        const Eigen::Vector3d reduced = apply_reduced(red.total, illuminant_to_color(light, xyzu)).head<3>();
        const Eigen::Vector3d white = illuminant_to_color(light, xyz).head<3>();
        const double de = delta_e2000(spectral, reduced, white);
        MESSAGE(std::string(name) << ": cross-path dE2000 = " << de);
        CHECK(de <= 3.5);
    }
}

TEST_CASE("bispec text and csv round trip") {
    std::mt19937_64 rng(16);
    const SpectralReradMatrix p = recompose(random_decomposed(rng, coarse()));
    std::stringstream ss;
    write_bispec(ss, p);
    const LoadedRerad back = read_bispec(ss);
    CHECK(back.matrix.grid() == p.grid());
    CHECK(max_abs_diff(back.matrix.entries(), p.entries()) == 0.0);

    std::ostringstream csv;
    const auto& g = coarse();
    csv << "lambda_o\\lambda_i";
    for (std::size_t i = 0; i < g.size(); ++i) {
        csv << "," << g[i];
    }
    csv << "\n";
    for (std::size_t o = 0; o < g.size(); ++o) {
        csv << g[o];
        for (std::size_t i = 0; i < g.size(); ++i) {
            // measurement noise below the diagonal and slightly negative values
            const double v = o < i ? 1e-4 : (o == i + 1 ? -1e-6 : p.at(o, i));
            csv << "," << std::setprecision(17) << v;
        }
        csv << "\n";
    }
    std::istringstream in(csv.str());
    const LoadedRerad l = read_bispec_csv(in);
    const std::size_t n = g.size();
    CHECK(l.zeroed_below_diagonal == n * (n - 1) / 2);
    CHECK(l.clamped_negative == n - 1);
    CHECK(l.matrix.at(20, 20) == doctest::Approx(p.at(20, 20)).epsilon(1e-15));

    std::istringstream bad("BISPEC v1 3 300 310\n1 2 3\n");
    CHECK_THROWS_AS(read_bispec(bad), DataError);
    std::istringstream junk("hello");
    CHECK_THROWS_AS(read_bispec(junk), DataError);
}

TEST_CASE("decomposition residual is reported, not zero") {
    FluorescentMaterial m;
    m.albedo_xyz = {0.3, 0.25, 0.2};
    m.lobes = {{0.7, 400, 30, 520, 30}};
    const auto basis = xyzu_basis();
    const DecomposedRerad d = decompose(material_spectral(m, basis.grid()));
    const double r = decomposition_residual(d, basis);
    CHECK(std::isfinite(r));
    CHECK(r >= 0.0);
}
