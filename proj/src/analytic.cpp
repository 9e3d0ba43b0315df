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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluoro {

namespace {

void require_gaussian(const SensitivityBasis& basis) {
    if (!basis.is_gaussian()) {
        throw std::invalid_argument("analytic reduction needs a basis built from Gaussian atoms");
    }
}

ReducedRerad finish_reduction(const Eigen::MatrixXd& atom_space, const SensitivityBasis& basis) {
    const Eigen::MatrixXd& t = basis.transfer();
    return {t.transpose() * atom_space * t * basis.C(), basis.labels()};
}

} // namespace

double DiagonalModel::operator()(double lambda) const {
    double sum = 0.0;
    for (const auto& g : gaussians) {
        sum += g(lambda);
    }
    return sum;
}

double alpha_max_conservative(double mu_e, double sigma_e, double cap) {
    if (!(sigma_e > 0.0)) {
        return cap;
    }
    const double denom =
        std::sqrt(std::numbers::pi / 2.0) * sigma_e * (1.0 + std::erf(mu_e / (std::numbers::sqrt2 * sigma_e)));
    if (!(denom > 1.0 / cap)) {
        return cap;
    }
    return 1.0 / denom;
}

double alpha_max_numeric(double mu_a, double sigma_a, double mu_e, double sigma_e, const WavelengthGrid& grid,
                         double cap) {
    if (!(sigma_a > 0.0) || !(sigma_e > 0.0)) {
        throw std::invalid_argument("alpha_max_numeric: spreads must be positive");
    }
    // Suffix Simpson sums on a fine lattice whose even nodes include every
    // grid sample, so each lambda_i reads its tail integral directly.
    const double step = grid.step_nm();
    const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(10.0 * step / sigma_e)));
    const double h = step / static_cast<double>(2 * sub);
    const double lo = grid.min_nm();
    const double hi = std::max(grid.max_nm(), mu_e + 12.0 * sigma_e);
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / (2.0 * h)));

    auto emission = [&](std::size_t node) {
        const double d = (lo + static_cast<double>(node) * h - mu_e) / sigma_e;
        return std::exp(-0.5 * d * d);
    };

    // tail[p] = integral from node 2p to the end.
    std::vector<double> tail(panels + 1, 0.0);
    for (std::size_t p = panels; p-- > 0;) {
        const std::size_t n0 = 2 * p;
        tail[p] = tail[p + 1] + h / 3.0 * (emission(n0) + 4.0 * emission(n0 + 1) + emission(n0 + 2));
    }

    double peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double li = grid[i];
        const auto p = static_cast<std::size_t>(std::llround((li - lo) / (2.0 * h)));
        const double da = (li - mu_a) / sigma_a;
        const double row = std::exp(-0.5 * da * da) * (p <= panels ? tail[p] : 0.0);
        peak = std::max(peak, row);
    }
    if (!(peak > 1.0 / cap)) {
        return cap;
    }
    return 1.0 / peak;
}

Gaussian2D resolve_lobe(const FluoLobe& lobe) {
    return {lobe.alpha_bar * alpha_max_conservative(lobe.mu_e, lobe.sigma_e), lobe.mu_a, lobe.sigma_a, lobe.mu_e,
            lobe.sigma_e};
}

std::vector<Gaussian2D> resolve_lobes(std::span<const FluoLobe> lobes) {
    std::vector<Gaussian2D> out;
    out.reserve(lobes.size());
    for (const auto& l : lobes) {
        out.push_back(resolve_lobe(l));
    }
    return out;
}

double eval_fbar(std::span<const Gaussian2D> lobes, double lambda_i, double lambda_o) {
    if (!(lambda_o > lambda_i)) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& g : lobes) {
        sum += g(lambda_i, lambda_o);
    }
    return sum;
}

ShearParameters shear_parameters(const Gaussian1D& absorption, const Gaussian1D& emission) {
    if (!(absorption.std > 0.0) || !(emission.std > 0.0)) {
        throw std::invalid_argument("shear_parameters: spreads must be positive");
    }
    const double vj = absorption.std * absorption.std;
    const double vk = emission.std * emission.std;
    ShearParameters s;
    s.first_shear << 1.0, -1.0, 0.0, 1.0;
    s.second_shear << 1.0, 0.0, vk / (vj + vk), 1.0;
    s.covariance << vj + vk, 0.0, 0.0, vj * vk / (vj + vk);
    s.mean << absorption.mean - emission.mean, (vj * emission.mean + vk * absorption.mean) / (vj + vk);
    return s;
}

double reduce_pair_closed_form(const Gaussian2D& fluo, const Gaussian1D& g_j, const Gaussian1D& g_k) {
    const Gaussian1D a = gaussian_product_1d({fluo.amplitude, fluo.mean_a, fluo.std_a}, g_j);
    const Gaussian1D e = gaussian_product_1d({1.0, fluo.mean_e, fluo.std_e}, g_k);
    const double amplitude = a.amplitude * e.amplitude;
    if (amplitude == 0.0) {
        return 0.0;
    }
    const double spread = std::sqrt(2.0 * (a.std * a.std + e.std * e.std));
    // 1 - erf(x) evaluated as erfc(x) so the far tail keeps relative precision.
    return std::numbers::pi * amplitude * a.std * e.std * std::erfc((a.mean - e.mean) / spread);
}

Eigen::MatrixXd atom_space_fluorescence(std::span<const Gaussian2D> lobes, const SensitivityBasis& basis) {
    require_gaussian(basis);
    const auto& atoms = basis.atoms();
    const auto m = static_cast<Eigen::Index>(atoms.size());
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m, m);
    for (const auto& lobe : lobes) {
        for (Eigen::Index e = 0; e < m; ++e) {
            for (Eigen::Index a = 0; a < m; ++a) {
                f(e, a) += reduce_pair_closed_form(lobe, atoms[static_cast<std::size_t>(a)],
                                                   atoms[static_cast<std::size_t>(e)]);
            }
        }
    }
    return f;
}

ReducedRerad reduce_fluorescence(std::span<const Gaussian2D> lobes, const SensitivityBasis& basis) {
    return finish_reduction(atom_space_fluorescence(lobes, basis), basis);
}

ReducedRerad reduce_fluorescence(std::span<const FluoLobe> lobes, const SensitivityBasis& basis) {
    const auto resolved = resolve_lobes(lobes);
    return reduce_fluorescence(resolved, basis);
}

ReducedRerad reduce_diagonal_analytic(const DiagonalModel& diagonal, const SensitivityBasis& basis) {
    require_gaussian(basis);
    const auto& atoms = basis.atoms();
    const auto m = static_cast<Eigen::Index>(atoms.size());
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index e = 0; e < m; ++e) {
        for (Eigen::Index a = e; a < m; ++a) {
            const Gaussian1D pair =
                gaussian_product_1d(atoms[static_cast<std::size_t>(e)], atoms[static_cast<std::size_t>(a)]);
            double sum = 0.0;
            for (const auto& g : diagonal.gaussians) {
                sum += gaussian_product_1d(pair, g).integral();
            }
            r(e, a) = sum;
            r(a, e) = sum;
        }
    }
    return finish_reduction(r, basis);
}

std::vector<double> discretize_fbar(std::span<const Gaussian2D> lobes, const WavelengthGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> out(n * n, 0.0);
    // Separable per lobe: fbar(o, i) = sum_q A_q(i) E_q(o).
    std::vector<double> absorb(n);
    std::vector<double> emit(n);
    for (const auto& g : lobes) {
        for (std::size_t i = 0; i < n; ++i) {
            const double da = (grid[i] - g.mean_a) / g.std_a;
            const double de = (grid[i] - g.mean_e) / g.std_e;
            absorb[i] = g.amplitude * std::exp(-0.5 * da * da);
            emit[i] = std::exp(-0.5 * de * de);
        }
        for (std::size_t o = 0; o < n; ++o) {
            double* row = out.data() + o * n;
            for (std::size_t i = 0; i < o; ++i) {
                row[i] += absorb[i] * emit[o];
            }
        }
    }
    return out;
}

Spectrum discretize_diagonal(const DiagonalModel& diagonal, const WavelengthGrid& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[i] = diagonal(grid[i]);
    }
    return Spectrum(grid, std::move(v));
}

} // namespace fluoro
