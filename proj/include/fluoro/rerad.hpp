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
#include "fluoro/grid.hpp"

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fluoro {

/// Bispectral reradiation matrix P(lambda_i, lambda_o) on a grid.
///
/// Stored row-major with rows indexed by lambda_o and columns by lambda_i,
/// both ascending. The diagonal holds the ordinary reflectance rho(lambda)
/// and stands for a Dirac term: it is integrated with a single grid measure.
/// Off-diagonal entries are densities per nm and integrate with two, on a
/// triangulation aligned with the diagonal: the density jumps there, so the
/// diagonal nodes carry half a cell of its one-sided limit, extrapolated
/// from the first two entries above the diagonal.
/// Entries with lambda_o < lambda_i are zero (no anti-Stokes reradiation).
class SpectralReradMatrix {
public:
    /// Strict constructor: entries must be finite, non-negative and zero
    /// below the energy diagonal.
    SpectralReradMatrix(WavelengthGrid grid, std::vector<double> entries);
    explicit SpectralReradMatrix(WavelengthGrid grid); // zero

    const WavelengthGrid& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }
    std::span<const double> entries() const { return entries_; }

    double at(std::size_t out_index, std::size_t in_index) const { return entries_[out_index * size() + in_index]; }

    Spectrum diagonal() const;

    /// Energy reradiated per unit input at each lambda_i:
    /// rho(lambda_i) + integral over lambda_o != lambda_i of P.
    std::vector<double> row_energy() const;

private:
    WavelengthGrid grid_;
    std::vector<double> entries_;
};

/// Reflectance / normalized-fluorescence split P = R + Fbar (I - R).
struct DecomposedRerad {
    Spectrum rho;
    std::vector<double> fbar; // N x N, same layout as SpectralReradMatrix, zero on and below the diagonal
    std::size_t clamped = 0;  // diagonal entries clamped to 1 - eps

    const WavelengthGrid& grid() const { return rho.grid(); }
    double fbar_at(std::size_t out_index, std::size_t in_index) const {
        return fbar[out_index * rho.size() + in_index];
    }
};

/// K x K matrix acting on colours (XYZ or XYZU).
struct ReducedRerad {
    Eigen::MatrixXd m;
    std::vector<std::string> labels;

    std::size_t channels() const { return static_cast<std::size_t>(m.rows()); }
};

inline constexpr double kDecomposeEpsilon = 1e-4;

DecomposedRerad decompose(const SpectralReradMatrix& p, double epsilon = kDecomposeEpsilon);
SpectralReradMatrix recompose(const DecomposedRerad& d);

/// S^T P S~ with the grid measure applied on both wavelength axes for
/// off-diagonal entries and once for the diagonal (delta) part.
ReducedRerad reduce_matrix(const SpectralReradMatrix& p, const SensitivityBasis& basis);

/// Same as above for an arbitrary N x N array in the same layout (entries may
/// be negative, e.g. linear combinations of matrices).
ReducedRerad reduce_matrix(std::span<const double> entries, const WavelengthGrid& grid, const SensitivityBasis& basis);

Eigen::VectorXd apply_reduced(const ReducedRerad& p, const Eigen::VectorXd& incoming);

/// P = R + Fbar (I - R).
ReducedRerad compose_reduced(const ReducedRerad& reflectance, const ReducedRerad& fbar);

struct OutgoingSplit {
    Eigen::VectorXd reflected;   // R c_i
    Eigen::VectorXd fluorescent; // Fbar (I - R) c_i
    Eigen::VectorXd total() const { return reflected + fluorescent; }
};

OutgoingSplit split_outgoing(const ReducedRerad& reflectance, const ReducedRerad& fbar, const Eigen::VectorXd& incoming);

/// Colour reradiated under illuminant `light`, measured by the sensors of
/// `sensors` (Gaussian or tabulated), by double trapezoidal quadrature.
Eigen::VectorXd outgoing_color_spectral(const SpectralReradMatrix& p, const Spectrum& light,
                                        const SensitivityBasis& sensors);

/// max |reduce(F) - reduce(Fbar) (I - reduce(R))|. Zero only for spectra in
/// the span of the basis; reported, never asserted exact.
double decomposition_residual(const DecomposedRerad& d, const SensitivityBasis& basis);

struct LoadedRerad {
    SpectralReradMatrix matrix;
    std::size_t zeroed_below_diagonal = 0;
    std::size_t clamped_negative = 0;
};

/// Builds a matrix from measured values: entries below the energy diagonal
/// are zeroed and negative noise is clamped to zero; both are counted.
LoadedRerad sanitize_measured(const WavelengthGrid& grid, std::vector<double> entries);

/// Text format:
///
///     BISPEC v1 N lambda_min lambda_max
///     N rows (lambda_o ascending) of N space-separated reals (lambda_i ascending)
///
/// The CSV variant has a header row `lambda_o\lambda_i,<l_i 1>,...,<l_i N>`
/// followed by N rows `<l_o>,<v 1>,...,<v N>`; wavelengths must form the same
/// uniform grid on both axes. read_rerad() accepts either.
LoadedRerad read_bispec(std::istream& in);
LoadedRerad read_bispec_csv(std::istream& in);
LoadedRerad read_rerad(const std::filesystem::path& path);
void write_bispec(std::ostream& out, const SpectralReradMatrix& p);

} // namespace fluoro
