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

#include "fluoro/gaussian.hpp"
#include "fluoro/grid.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fluoro {

/// Gaussian fits of the CIE 2006 2-degree colour matching functions, plus a
/// single ultraviolet band. x-bar needs two lobes, y-bar and z-bar one each.
namespace xyzu_atoms {
inline constexpr Gaussian1D kXBarShort{0.35087, 443.412226, 20.838149};
inline constexpr Gaussian1D kXBarLong{1.141263, 596.813847, 33.276659};
inline constexpr Gaussian1D kYBar{1.024335, 560.186336, 43.898132};
inline constexpr Gaussian1D kZBar{1.915863, 447.268188, 23.542626};
inline constexpr Gaussian1D kUV{1.0, 382.535501, 57.432550};
} // namespace xyzu_atoms

/// A set of K sensitivity functions discretized on a grid, with their duals.
///
/// Inner products use the trapezoidal weights W of the grid, so the dual is
/// S~ = S C with C = (S^T W S)^-1 and S^T W S~ = I. When the basis is built
/// from Gaussian atoms, S = G T_G where the columns of G are the discretized
/// atoms and T_G (M x K) adds atoms contributing to the same channel.
class SensitivityBasis {
public:
    const WavelengthGrid& grid() const { return grid_; }
    std::size_t channels() const { return static_cast<std::size_t>(S_.cols()); }
    const std::vector<std::string>& labels() const { return labels_; }

    bool is_gaussian() const { return !atoms_.empty(); }
    const std::vector<Gaussian1D>& atoms() const { return atoms_; }
    const Eigen::MatrixXd& transfer() const { return transfer_; } // M x K

    const Eigen::MatrixXd& S() const { return S_; }           // N x K
    const Eigen::MatrixXd& S_dual() const { return S_dual_; } // N x K
    const Eigen::MatrixXd& C() const { return C_; }           // K x K
    const Eigen::MatrixXd& gram() const { return gram_; }     // S^T W S

    /// max |S^T W S~ - I|.
    double dual_identity_error() const;

    /// Index of the luminance (Y) channel; 0 when no channel is labelled Y.
    std::size_t luminance_channel() const { return luminance_; }

    /// Albedo colours are normalized so that a unit reflectance has
    /// luminance 1: albedo = albedo_scale() * S^T W rho, with albedo_scale()
    /// = 1 / integral(s_Y). Upsampling is rho(lambda) = S~ albedo / albedo_scale().
    double albedo_scale() const { return albedo_scale_; }

    /// R_k = S^T W diag(S~_k / albedo_scale) S~, one K x K matrix per channel.
    const std::vector<Eigen::MatrixXd>& albedo_reflectance_matrices() const { return R_k_; }

    /// Stable 64-bit hash of grid, atoms, transfer and labels (hex string).
    std::string hash() const;

    /// Projects a spectrum onto the sensitivities: S^T W v.
    Eigen::VectorXd project(std::span<const double> values) const;

    friend SensitivityBasis build_basis(const std::vector<Gaussian1D>&, const Eigen::MatrixXd&, const WavelengthGrid&,
                                        std::vector<std::string>);
    friend SensitivityBasis tabulated_basis(const Eigen::MatrixXd&, const WavelengthGrid&, std::vector<std::string>);

private:
    SensitivityBasis(WavelengthGrid grid, std::vector<Gaussian1D> atoms, Eigen::MatrixXd transfer, Eigen::MatrixXd S,
                     std::vector<std::string> labels);

    WavelengthGrid grid_;
    std::vector<Gaussian1D> atoms_;
    Eigen::MatrixXd transfer_;
    Eigen::MatrixXd S_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd C_;
    Eigen::MatrixXd S_dual_;
    std::vector<std::string> labels_;
    std::size_t luminance_ = 0;
    double albedo_scale_ = 1.0;
    std::vector<Eigen::MatrixXd> R_k_;
};

/// Builds S = G T_G from Gaussian atoms. Throws DataError when S^T W S is
/// singular (rank-deficient basis) and std::invalid_argument on shape errors.
SensitivityBasis build_basis(const std::vector<Gaussian1D>& atoms, const Eigen::MatrixXd& transfer,
                             const WavelengthGrid& grid, std::vector<std::string> labels = {});

/// Basis from tabulated sensitivity columns (N x K). Analytic reductions are
/// not available on such a basis.
SensitivityBasis tabulated_basis(const Eigen::MatrixXd& S, const WavelengthGrid& grid,
                                 std::vector<std::string> labels = {});

/// The 5 x 4 atom-to-channel matrix: both x-bar lobes feed X.
Eigen::MatrixXd xyzu_transfer();

/// Gaussian XYZ basis (4 atoms, K = 3).
SensitivityBasis xyz_basis(const WavelengthGrid& grid = default_grid());

/// Gaussian XYZU basis (5 atoms, K = 4), optionally with a different UV atom.
SensitivityBasis xyzu_basis(const WavelengthGrid& grid = default_grid(), const Gaussian1D& uv = xyzu_atoms::kUV);

/// "xyz" or "xyzu".
SensitivityBasis basis_by_name(const std::string& name, const WavelengthGrid& grid = default_grid());

/// JSON descriptor: {atoms:[{amplitude,mean_nm,std_nm}], transfer:[[...]],
/// grid:{min,max,step}, labels:[...]} (labels optional).
SensitivityBasis read_basis_json(std::istream& in);
void write_basis_json(std::ostream& out, const SensitivityBasis& basis);

} // namespace fluoro
