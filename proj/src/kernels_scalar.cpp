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

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace fluoro::kernels {

namespace {

double weighted_dot_scalar(const double* a, const double* b, const double* w, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += a[i] * b[i] * w[i];
    }
    return sum;
}

void matvec_scalar(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            sum += row[c] * x[c];
        }
        y[r] = sum;
    }
}

void transform_colors_scalar(const double* m, std::size_t k, const double* in, const double* scale, double* out,
                             std::size_t n) {
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t r = 0; r < k; ++r) {
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                sum += m[r * k + j] * in[j * n + p];
            }
            out[r * n + p] = scale[p] * sum;
        }
    }
}

constexpr KernelTable kScalar{weighted_dot_scalar, matvec_scalar, transform_colors_scalar};

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* select_default() {
    if (const char* env = std::getenv("FLUORO_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
        return &kScalar;
    }
    if (const KernelTable* avx2 = avx2_table()) {
        return avx2;
    }
    return &kScalar;
}

} // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable& active() {
    const KernelTable* table = g_active.load(std::memory_order_acquire);
    if (table == nullptr) {
        table = select_default();
        g_active.store(table, std::memory_order_release);
    }
    return *table;
}

Isa active_isa() { return &active() == &kScalar ? Isa::scalar : Isa::avx2; }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
    if (isa == Isa::scalar) {
        g_active.store(&kScalar, std::memory_order_release);
        return;
    }
    const KernelTable* avx2 = avx2_table();
    if (avx2 == nullptr) {
        throw std::runtime_error("AVX2 kernels are not available on this machine");
    }
    g_active.store(avx2, std::memory_order_release);
}

#if !defined(FLUORO_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif

} // namespace fluoro::kernels
