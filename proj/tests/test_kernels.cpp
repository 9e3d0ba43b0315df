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


#include "fluoro/kernels.hpp"

#include <doctest.h>
#include <random>
#include <vector>

using namespace fluoro;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

} // namespace

TEST_CASE("scalar kernels against naive loops") {
    std::mt19937_64 rng(7);
    const auto& k = kernels::scalar_table();
    const auto a = random_vector(rng, 37);
    const auto b = random_vector(rng, 37);
    const auto w = random_vector(rng, 37, 0.0, 2.0);
    double ref = 0.0;
    for (std::size_t i = 0; i < 37; ++i) {
        ref += a[i] * b[i] * w[i];
    }
    CHECK(k.weighted_dot(a.data(), b.data(), w.data(), 37) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(k.weighted_dot(a.data(), b.data(), w.data(), 0) == 0.0);

    const auto m = random_vector(rng, 5 * 7);
    const auto x = random_vector(rng, 7);
    std::vector<double> y(5);
    k.matvec(m.data(), 5, 7, x.data(), y.data());
    for (std::size_t r = 0; r < 5; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < 7; ++c) {
            s += m[r * 7 + c] * x[c];
        }
        CHECK(y[r] == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("transform_colors against naive loops") {
    std::mt19937_64 rng(8);
    for (std::size_t kk : {3u, 4u}) {
        const std::size_t n = 29;
        const auto m = random_vector(rng, kk * kk);
        const auto in = random_vector(rng, kk * n);
        const auto scale = random_vector(rng, n, 0.0, 1.0);
        std::vector<double> out(kk * n);
        kernels::scalar_table().transform_colors(m.data(), kk, in.data(), scale.data(), out.data(), n);
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t r = 0; r < kk; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < kk; ++c) {
                    s += m[r * kk + c] * in[c * n + p];
                }
                CHECK(out[r * n + p] == doctest::Approx(scale[p] * s).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("simd variants agree with the scalar reference") {
    const kernels::KernelTable* simd = kernels::avx2_table();
    if (simd == nullptr) {
        MESSAGE("no AVX2 variant on this machine; skipped");
        return;
    }
    const auto& ref = kernels::scalar_table();
    std::mt19937_64 rng(9);
    // Sizes straddle the vector width and its remainders.
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 501u, 1003u}) {
        const auto a = random_vector(rng, n);
        const auto b = random_vector(rng, n);
        const auto w = random_vector(rng, n, 0.0, 2.0);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mag += std::abs(a[i] * b[i] * w[i]);
        }
        CHECK(std::abs(simd->weighted_dot(a.data(), b.data(), w.data(), n) -
                       ref.weighted_dot(a.data(), b.data(), w.data(), n)) <= 1e-14 * (1.0 + mag));

        const std::size_t rows = 4;
        const auto m = random_vector(rng, rows * n);
        std::vector<double> y1(rows);
        std::vector<double> y2(rows);
        ref.matvec(m.data(), rows, n, a.data(), y1.data());
        simd->matvec(m.data(), rows, n, a.data(), y2.data());
        for (std::size_t r = 0; r < rows; ++r) {
            CHECK(y1[r] == doctest::Approx(y2[r]).epsilon(1e-13));
        }

        for (std::size_t kk : {3u, 4u}) {
            const auto mk = random_vector(rng, kk * kk);
            const auto in = random_vector(rng, kk * n);
            const auto scale = random_vector(rng, n, 0.0, 1.0);
            std::vector<double> o1(kk * n);
            std::vector<double> o2(kk * n);
            ref.transform_colors(mk.data(), kk, in.data(), scale.data(), o1.data(), n);
            simd->transform_colors(mk.data(), kk, in.data(), scale.data(), o2.data(), n);
            for (std::size_t i = 0; i < o1.size(); ++i) {
                CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("isa selection") {
    const kernels::Isa before = kernels::active_isa();
    kernels::force_isa(kernels::Isa::scalar);
    CHECK(kernels::active_isa() == kernels::Isa::scalar);
    CHECK(&kernels::active() == &kernels::scalar_table());
    if (kernels::avx2_table() != nullptr) {
        kernels::force_isa(kernels::Isa::avx2);
        CHECK(kernels::isa_name(kernels::active_isa()) == "avx2");
    } else {
        CHECK_THROWS(kernels::force_isa(kernels::Isa::avx2));
    }
    kernels::force_isa(before);
}
