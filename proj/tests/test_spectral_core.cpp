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


#include "fluoro/basis.hpp"
#include "fluoro/error.hpp"
#include "fluoro/gaussian.hpp"
#include "fluoro/grid.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <sstream>

using namespace fluoro;

TEST_CASE("grid sample counts") {
    CHECK(make_grid(300, 800, 1).size() == 501);
    CHECK(make_grid(300, 800, 5).size() == 101);
    CHECK_THROWS_AS(make_grid(400, 300, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(300, 800, 0), std::invalid_argument);
    CHECK(default_grid() == make_grid(300, 800, 1));
}

TEST_CASE("grid weights are trapezoidal") {
    const auto g = make_grid(300, 310, 2);
    const auto w = g.weights();
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(2.0));
    CHECK(w[5] == doctest::Approx(1.0));
    CHECK(g.nearest_index(303.2) == 2);
    CHECK(g.nearest_index(100) == 0);
}

TEST_CASE("inner product of constants is the interval length") {
    const auto g = make_grid(300, 800, 5);
    std::vector<double> one(g.size(), 1.0);
    CHECK(inner_product(g, one, one) == doctest::Approx(500.0));
}

TEST_CASE("gaussian values") {
    CHECK(Gaussian1D{2, 500, 10}(500) == 2.0);
    CHECK(Gaussian1D{1, 500, 10}(510) == doctest::Approx(0.606531).epsilon(1e-6));
    const Gaussian1D y = xyzu_atoms::kYBar;
    CHECK(y(560.186336) == doctest::Approx(1.024335));
    CHECK(Gaussian1D{3, 0, 2}.integral() == doctest::Approx(3 * 2 * std::sqrt(2 * M_PI)));
}

TEST_CASE("gaussian product") {
    const Gaussian1D self = gaussian_product_1d({1, 500, 10}, {1, 500, 10});
    CHECK(self.amplitude == doctest::Approx(1.0));
    CHECK(self.mean == doctest::Approx(500.0));
    CHECK(self.std == doctest::Approx(10.0 / std::sqrt(2.0)));

    const Gaussian1D g1{1, 400, 20};
    const Gaussian1D g2{1, 500, 20};
    const Gaussian1D p = gaussian_product_1d(g1, g2);
    CHECK(p.amplitude == doctest::Approx(1.930454e-3).epsilon(1e-6));
    CHECK(p.mean == doctest::Approx(450.0));
    CHECK(p.std == doctest::Approx(14.142136));
    for (double x : {380.0, 420.0, 450.0, 473.0, 530.0}) {
        CHECK(p(x) == doctest::Approx(oracle::gauss(g1, x) * oracle::gauss(g2, x)).epsilon(1e-12));
    }

    const Gaussian1D zero = gaussian_product_1d({0, 420, 5}, {1.5, 600, 30});
    CHECK(zero.amplitude == 0.0);
}

TEST_CASE("discretize") {
    const auto grid = default_grid();
    const Spectrum s = discretize({1, 550, 50}, grid);
    CHECK(s.size() == 501);
    const auto v = s.values();
    CHECK(std::max_element(v.begin(), v.end()) - v.begin() == 250);
    const Spectrum z = discretize({0, 550, 50}, grid);
    CHECK(std::all_of(z.values().begin(), z.values().end(), [](double x) { return x == 0.0; }));

    const Spectrum zb = discretize(xyzu_atoms::kZBar, grid);
    const auto zv = zb.values();
    const auto peak = std::max_element(zv.begin(), zv.end());
    CHECK(grid[static_cast<std::size_t>(peak - zv.begin())] == 447.0);
    CHECK(*peak == doctest::Approx(1.915863).epsilon(1e-4));
}

TEST_CASE("dual identity of the XYZ and XYZU bases") {
    const auto xyzu = xyzu_basis();
    CHECK(xyzu.channels() == 4);
    CHECK(xyzu.transfer().rows() == 5);
    CHECK(xyzu.dual_identity_error() < 1e-6);
    const Eigen::MatrixXd W = Eigen::Map<const Eigen::VectorXd>(xyzu.grid().weights().data(), 501).asDiagonal();
    const Eigen::MatrixXd I = xyzu.S().transpose() * W * xyzu.S_dual();
    CHECK((I - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(xyz_basis().dual_identity_error() < 1e-6);
    CHECK(xyzu.labels() == std::vector<std::string>{"X", "Y", "Z", "U"});
    CHECK(xyzu.luminance_channel() == 1);
}

TEST_CASE("single-channel basis normalizes by its own norm") {
    const auto grid = make_grid(300, 800, 2);
    const Eigen::MatrixXd t = Eigen::MatrixXd::Ones(1, 1);
    const auto b = build_basis({{1, 550, 40}}, t, grid);
    const std::vector<double> w = oracle::trapezoid_weights(grid.samples());
    double norm = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        norm += w[i] * std::pow(oracle::gauss(1, 550, 40, grid[i]), 2);
    }
    for (Eigen::Index i = 0; i < b.S().rows(); i += 17) {
        CHECK(b.S_dual()(i, 0) == doctest::Approx(b.S()(i, 0) / norm).epsilon(1e-12));
    }
}

TEST_CASE("duplicate atoms make a singular basis") {
    const Gaussian1D a{1, 550, 40};
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(build_basis({a, a}, t, default_grid()), DataError);
}

TEST_CASE("basis hash and descriptor round trip") {
    const auto a = xyzu_basis();
    const auto b = xyzu_basis();
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != xyz_basis().hash());
    CHECK(a.hash() != xyzu_basis(default_grid(), {1, 370, 20}).hash());
    std::stringstream ss;
    write_basis_json(ss, a);
    const auto c = read_basis_json(ss);
    CHECK(c.hash() == a.hash());
    CHECK_THROWS_AS(basis_by_name("rgb"), std::invalid_argument);
}

TEST_CASE("spectrum csv round trip and resampling") {
    const auto grid = make_grid(300, 800, 5);
    const Spectrum s = discretize({0.7, 480, 35}, grid);
    std::stringstream ss;
    write_spectrum_csv(ss, s);
    const SpectrumTable t = read_spectrum_csv(ss);
    const Spectrum r = resample(t, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(r[i] == doctest::Approx(s[i]).epsilon(1e-9));
    }
    std::stringstream bad("lambda,value\n400,1\n390,2\n");
    CHECK_THROWS_AS(read_spectrum_csv(bad), DataError);
}
