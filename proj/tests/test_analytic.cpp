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
#include "fluoro/fitting.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <numbers>
#include <random>

using namespace fluoro;

namespace {

constexpr double kPi = std::numbers::pi;

const SensitivityBasis& wide_xyzu() {
    static const SensitivityBasis b = xyzu_basis(make_grid(100, 1100, 1));
    return b;
}

} // namespace

TEST_CASE("fbar evaluation") {
    const Gaussian2D g = resolve_lobe({0.6, 420, 30, 550, 40});
    const std::vector<Gaussian2D> lobes{g};
    CHECK(eval_fbar(lobes, 500, 450) == 0.0);
    CHECK(eval_fbar(lobes, 500, 500) == 0.0);
    CHECK(eval_fbar(lobes, 420, 550) == doctest::Approx(g.amplitude).epsilon(1e-15));
    CHECK(g.amplitude == doctest::Approx(0.6 * alpha_max_conservative(550, 40)));

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(300, 800);
    const std::vector<Gaussian2D> two{g, resolve_lobe({0.3, 380, 20, 610, 25})};
    for (int k = 0; k < 200; ++k) {
        const double li = u(rng);
        const double lo = u(rng);
        double ref = 0.0;
        if (lo > li) {
            for (const auto& q : two) {
                ref += q.amplitude * oracle::gauss(1, q.mean_a, q.std_a, li) * oracle::gauss(1, q.mean_e, q.std_e, lo);
            }
        }
        CHECK(std::abs(eval_fbar(two, li, lo) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("closed form limits") {
    const Gaussian2D f{1.0, 300, 20, 1e6, 30};
    const Gaussian1D gj{1.0, 300, 25};
    const Gaussian1D gk{1.0, 1e6, 35};
    const Gaussian1D a = gaussian_product_1d({1, 300, 20}, gj);
    const Gaussian1D e = gaussian_product_1d({1, 1e6, 30}, gk);
    const double full = 2 * kPi * a.amplitude * e.amplitude * a.std * e.std;
    CHECK(reduce_pair_closed_form(f, gj, gk) == doctest::Approx(full).epsilon(1e-14));

    const Gaussian2D s{2.0, 500, 20, 500, 30};
    const Gaussian1D sj{1.0, 500, 15};
    const Gaussian1D sk{1.0, 500, 40};
    const Gaussian1D sa = gaussian_product_1d({2, 500, 20}, sj);
    const Gaussian1D se = gaussian_product_1d({1, 500, 30}, sk);
    CHECK(reduce_pair_closed_form(s, sj, sk) ==
          doctest::Approx(kPi * sa.amplitude * se.amplitude * sa.std * se.std).epsilon(1e-14));
}

TEST_CASE("closed form against triangular quadrature") {
    const Gaussian2D f{1.0, 420, 30, 550, 40};
    const double closed = reduce_pair_closed_form(f, xyzu_atoms::kZBar, xyzu_atoms::kYBar);
    const double quad = oracle::fluo_pair_integral(f, xyzu_atoms::kZBar, xyzu_atoms::kYBar);
    CHECK(std::abs(closed - quad) <= 1e-6 * std::abs(quad));

    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0, 1);
    const std::vector<Gaussian1D> atoms{xyzu_atoms::kXBarShort, xyzu_atoms::kXBarLong, xyzu_atoms::kYBar,
                                        xyzu_atoms::kZBar, xyzu_atoms::kUV};
    for (int k = 0; k < 20; ++k) {
        const double mu_a = 330 + 250 * u(rng);
        const Gaussian2D g{0.1 + u(rng), mu_a, 8 + 60 * u(rng), mu_a - 40 + 250 * u(rng), 8 + 60 * u(rng)};
        const auto& gj = atoms[static_cast<std::size_t>(5 * u(rng))];
        const auto& gk = atoms[static_cast<std::size_t>(5 * u(rng))];
        const double c = reduce_pair_closed_form(g, gj, gk);
        const double q = oracle::fluo_pair_integral(g, gj, gk);
        CHECK(std::abs(c - q) <= 1e-6 * std::abs(q));
    }
}

TEST_CASE("shear parameters") {
    const ShearParameters eq = shear_parameters({1, 450, 20}, {1, 550, 20});
    CHECK(eq.covariance(0, 0) == doctest::Approx(2 * 400.0));
    CHECK(eq.covariance(1, 1) == doctest::Approx(400.0 / 2));
    CHECK(eq.mean(1) == doctest::Approx(500.0));
    CHECK(eq.mean(0) == doctest::Approx(-100.0));

    const double sk = 40.0;
    const double sj = 1e-3 * sk;
    const ShearParameters lim = shear_parameters({1, 450, sj}, {1, 550, sk});
    CHECK(lim.covariance(1, 1) == doctest::Approx(sj * sj).epsilon(1e-5));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(1, 100);
    for (int k = 0; k < 50; ++k) {
        const double a = u(rng);
        const double b = u(rng);
        const ShearParameters p = shear_parameters({1, 4 * a, a}, {1, 5 * b, b});
        CHECK(p.covariance.determinant() == doctest::Approx(a * a * b * b).epsilon(1e-12));
        CHECK(p.first_shear.determinant() == 1.0);
        CHECK(p.second_shear.determinant() == 1.0);
        const Eigen::Matrix2d sigma = Eigen::Vector2d(a * a, b * b).asDiagonal();
        const Eigen::Matrix2d t = p.second_shear * p.first_shear;
        const Eigen::Matrix2d c = t * sigma * t.transpose();
        const double scale = c.diagonal().cwiseAbs().maxCoeff();
        CHECK(std::abs(c(0, 1)) <= 1e-12 * scale);
        CHECK(std::abs(c(1, 0)) <= 1e-12 * scale);
        CHECK((c - p.covariance).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        const Eigen::Vector2d m = t * Eigen::Vector2d(4 * a, 5 * b);
        CHECK((m - p.mean).cwiseAbs().maxCoeff() <= 1e-12 * (4 * a + 5 * b));
    }
}

TEST_CASE("reduced fluorescence") {
    const SensitivityBasis basis = xyzu_basis();
    const std::vector<FluoLobe> none{{0.0, 420, 30, 550, 40}};
    CHECK(reduce_fluorescence(std::span<const FluoLobe>(none), basis).m.cwiseAbs().maxCoeff() == 0.0);

    const std::vector<Gaussian2D> lobes{resolve_lobe({0.8, 420, 30, 550, 40})};
    const ReducedRerad a = reduce_fluorescence(lobes, basis);
    const ReducedRerad b = reduce_matrix(discretize_fbar(lobes, basis.grid()), basis.grid(), basis);
    CHECK((a.m - b.m).cwiseAbs().maxCoeff() <= 1e-4);

    const std::vector<Gaussian2D> other{resolve_lobe({0.5, 360, 20, 480, 25})};
    const std::vector<Gaussian2D> both{lobes[0], other[0]};
    const Eigen::MatrixXd sum = reduce_fluorescence(lobes, basis).m + reduce_fluorescence(other, basis).m;
    CHECK((reduce_fluorescence(both, basis).m - sum).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("reduced fluorescence on a wide grid matches quadrature tightly") {
    const auto& basis = wide_xyzu();
    const std::vector<Gaussian2D> lobes{resolve_lobe({1.0, 400, 15, 560, 20})};
    const ReducedRerad a = reduce_fluorescence(lobes, basis);
    const ReducedRerad b = reduce_matrix(discretize_fbar(lobes, basis.grid()), basis.grid(), basis);
    CHECK((a.m - b.m).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("analytic diagonal reduction") {
    const auto& basis = wide_xyzu();
    CHECK(reduce_diagonal_analytic(DiagonalModel{}, basis).m.cwiseAbs().maxCoeff() == 0.0);
    CHECK(reduce_diagonal_analytic(DiagonalModel{{{1.0, 2000, 30}}}, basis).m.cwiseAbs().maxCoeff() < 1e-8);

    // A smooth measured-style reflectance, fitted with six lobes.
    const WavelengthGrid g = default_grid();
    Spectrum rho(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g[i];
        rho[i] = 0.1 + 0.5 / (1 + std::exp(-(x - 560) / 18)) - 0.15 * oracle::gauss(1, 470, 30, x);
    }
    const DiagonalFit fit = fit_diagonal(rho, 6);
    const ReducedRerad analytic = reduce_diagonal_analytic(fit.model, basis);
    const Spectrum hat = discretize_diagonal(fit.model, basis.grid());
    const std::size_t n = basis.grid().size();
    std::vector<double> diag(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i * n + i] = hat[i];
    }
    const ReducedRerad brute = reduce_matrix(diag, basis.grid(), basis);
    CHECK((analytic.m - brute.m).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("energy bounds") {
    const double c = alpha_max_conservative(650, 60);
    CHECK(c == doctest::Approx(1.0 / (std::sqrt(2 * kPi) * 60)).epsilon(1e-3));
    CHECK(c == doctest::Approx(6.6490e-3).epsilon(1e-4));
    CHECK(alpha_max_conservative(650, 120) == doctest::Approx(c / 2).epsilon(1e-3));
    CHECK(alpha_max_conservative(650, 1e-12) == kAlphaMaxCap);
    CHECK(alpha_max_conservative(0, 30) == doctest::Approx(1.0 / (std::sqrt(kPi / 2) * 30)));

    const WavelengthGrid grid = default_grid();
    CHECK(alpha_max_numeric(400, 50, 650, 60, grid) >= c);
    CHECK(alpha_max_numeric(400, 50, 650, 60, grid) == doctest::Approx(1.0 / (std::sqrt(2 * kPi) * 60)).epsilon(1e-3));
    CHECK(alpha_max_numeric(700, 10, 350, 5, grid) == kAlphaMaxCap);

    // Against an independent tail integral.
    const double mu_a = 480;
    const double sigma_a = 30;
    const double mu_e = 500;
    const double sigma_e = 25;
    double peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        peak = std::max(peak, oracle::gauss(1, mu_a, sigma_a, grid[i]) * oracle::emission_tail_mass(mu_e, sigma_e, grid[i]));
    }
    CHECK(alpha_max_numeric(mu_a, sigma_a, mu_e, sigma_e, grid) == doctest::Approx(1.0 / peak).epsilon(1e-6));
    CHECK(alpha_max_conservative(mu_e, sigma_e) <= 1.0 / peak);
}
