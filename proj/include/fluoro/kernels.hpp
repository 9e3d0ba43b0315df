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

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the spectral paths (quadrature dot
// products, dense matrix-vector products) and the preview renderer (one
// reduced matrix applied to many colors).
//
// Every kernel has a scalar reference implementation. An AVX2+FMA variant is
// compiled in a separate translation unit and selected at runtime when the
// CPU supports it. The variants differ only in summation order, so results
// agree to rounding (see tests/test_kernels.cpp), and a given ISA is bitwise
// deterministic.

namespace fluoro::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
    /// sum_i a[i] * b[i] * w[i]
    double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t n);

    /// y = M x, with M row-major rows x cols.
    void (*matvec)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);

    /// out[k][p] = scale[p] * sum_j m[k][j] * in[j][p] for a k x k row-major
    /// matrix and planar (structure-of-arrays) colors with `n` pixels per
    /// plane. `in` and `out` must not alias.
    void (*transform_colors)(const double* m, std::size_t k, const double* in, const double* scale, double* out,
                             std::size_t n);
};

const KernelTable& scalar_table();

/// Null when the AVX2 variant is not compiled in or not supported by the CPU.
const KernelTable* avx2_table();

/// Kernel table in use. Defaults to the best supported ISA; the environment
/// variable FLUORO_SIMD=scalar forces the reference kernels.
const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

/// Overrides runtime selection (tests, benchmarks). Throws if the requested
/// ISA is unavailable.
void force_isa(Isa isa);

inline double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
    return active().weighted_dot(a, b, w, n);
}

inline void matvec(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    active().matvec(m, rows, cols, x, y);
}

inline void transform_colors(const double* m, std::size_t k, const double* in, const double* scale, double* out,
                             std::size_t n) {
    active().transform_colors(m, k, in, scale, out, n);
}

} // namespace fluoro::kernels
