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


// Kernels carry a per-function target attribute so the rest of the library
// stays baseline x86-64. Nothing in here may run before avx2_table() has
// confirmed CPU support.

#include "fluoro/kernels.hpp"

#include <immintrin.h>

namespace fluoro::kernels {

namespace {

#define FLUORO_AVX2 __attribute__((target("avx2,fma")))

FLUORO_AVX2 inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

FLUORO_AVX2 double weighted_dot_avx2(const double* a, const double* b, const double* w, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d ab0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d ab1 = _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(ab0, _mm256_loadu_pd(w + i), acc0);
        acc1 = _mm256_fmadd_pd(ab1, _mm256_loadu_pd(w + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(ab, _mm256_loadu_pd(w + i), acc0);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        sum += a[i] * b[i] * w[i];
    }
    return sum;
}

FLUORO_AVX2 void matvec_avx2(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 8 <= cols; c += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c + 4), _mm256_loadu_pd(x + c + 4), acc1);
        }
        for (; c + 4 <= cols; c += 4) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc0);
        }
        double sum = hsum(_mm256_add_pd(acc0, acc1));
        for (; c < cols; ++c) {
            sum += row[c] * x[c];
        }
        y[r] = sum;
    }
}

FLUORO_AVX2 void transform_colors_avx2(const double* m, std::size_t k, const double* in, const double* scale, double* out,
                           std::size_t n) {
    std::size_t p = 0;
    for (; p + 4 <= n; p += 4) {
        const __m256d s = _mm256_loadu_pd(scale + p);
        for (std::size_t r = 0; r < k; ++r) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t j = 0; j < k; ++j) {
                acc = _mm256_fmadd_pd(_mm256_set1_pd(m[r * k + j]), _mm256_loadu_pd(in + j * n + p), acc);
            }
            _mm256_storeu_pd(out + r * n + p, _mm256_mul_pd(s, acc));
        }
    }
    for (; p < n; ++p) {
        for (std::size_t r = 0; r < k; ++r) {
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                sum += m[r * k + j] * in[j * n + p];
            }
            out[r * n + p] = scale[p] * sum;
        }
    }
}

constexpr KernelTable kAvx2{weighted_dot_avx2, matvec_avx2, transform_colors_avx2};

} // namespace

const KernelTable* avx2_table() {
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &kAvx2 : nullptr;
}

} // namespace fluoro::kernels
