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


#include "fluoro/rerad.hpp"

#include "fluoro/error.hpp"
#include "fluoro/kernels.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fluoro {

namespace {

void require_same_grid(const WavelengthGrid& a, const WavelengthGrid& b) {
    if (!(a == b)) {
        throw DataError("wavelength grids do not match");
    }
}

// One-sided limit of the off-diagonal density at lambda_o -> lambda_i+,
// linearly extrapolated from the two entries above the diagonal.
double edge_limit(std::span<const double> e, std::size_t n, std::size_t i) {
    if (i + 1 >= n) {
        return 0.0;
    }
    const double first = e[(i + 1) * n + i];
    if (i + 2 >= n) {
        return first;
    }
    return 2.0 * first - e[(i + 2) * n + i];
}

} // namespace

SpectralReradMatrix::SpectralReradMatrix(WavelengthGrid grid, std::vector<double> entries)
    : grid_(std::move(grid)), entries_(std::move(entries)) {
    const std::size_t n = grid_.size();
    if (entries_.size() != n * n) {
        throw std::invalid_argument("reradiation matrix must be N x N");
    }
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = entries_[o * n + i];
            if (!std::isfinite(v) || v < 0.0) {
                throw DataError("reradiation matrix entries must be finite and non-negative");
            }
            if (o < i && v != 0.0) {
                throw DataError("reradiation matrix has energy below the diagonal (lambda_o < lambda_i)");
            }
        }
    }
}

SpectralReradMatrix::SpectralReradMatrix(WavelengthGrid grid)
    : grid_(std::move(grid)), entries_(grid_.size() * grid_.size(), 0.0) {}

Spectrum SpectralReradMatrix::diagonal() const {
    const std::size_t n = size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = at(i, i);
    }
    return Spectrum(grid_, std::move(d));
}

std::vector<double> SpectralReradMatrix::row_energy() const {
    const std::size_t n = size();
    const auto w = grid_.weights();
    std::vector<double> energy(n, 0.0);
    for (std::size_t o = 0; o < n; ++o) {
        const double* row = entries_.data() + o * n;
        for (std::size_t i = 0; i < o; ++i) {
            energy[i] += row[i] * w[o];
        }
        energy[o] += row[o];
    }
    for (std::size_t i = 0; i < n; ++i) {
        energy[i] += 0.5 * w[i] * edge_limit(entries_, n, i);
    }
    return energy;
}

DecomposedRerad decompose(const SpectralReradMatrix& p, double epsilon) {
    const std::size_t n = p.size();
    std::vector<double> rho(n);
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = p.at(i, i);
        if (r > 1.0) {
            throw DataError("diagonal reflectance exceeds 1 at " + std::to_string(p.grid()[i]) + " nm");
        }
        if (r > 1.0 - epsilon) {
            rho[i] = 1.0 - epsilon;
            ++clamped;
        } else {
            rho[i] = r;
        }
    }
    std::vector<double> fbar(n * n, 0.0);
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t i = 0; i < o; ++i) {
            fbar[o * n + i] = p.at(o, i) / (1.0 - rho[i]);
        }
    }
    return {Spectrum(p.grid(), std::move(rho)), std::move(fbar), clamped};
}

SpectralReradMatrix recompose(const DecomposedRerad& d) {
    const std::size_t n = d.rho.size();
    if (d.fbar.size() != n * n) {
        throw std::invalid_argument("normalized fluorescence must be N x N");
    }
    std::vector<double> entries(n * n, 0.0);
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t i = 0; i < o; ++i) {
            entries[o * n + i] = d.fbar[o * n + i] * (1.0 - d.rho[i]);
        }
        entries[o * n + o] = d.rho[o];
    }
    return SpectralReradMatrix(d.grid(), std::move(entries));
}

ReducedRerad reduce_matrix(std::span<const double> entries, const WavelengthGrid& grid, const SensitivityBasis& basis) {
    require_same_grid(grid, basis.grid());
    const std::size_t n = grid.size();
    if (entries.size() != n * n) {
        throw std::invalid_argument("reduce_matrix: matrix must be N x N");
    }
    const auto k = static_cast<Eigen::Index>(basis.channels());
    const auto w = grid.weights();
    const Eigen::MatrixXd& S = basis.S();
    const Eigen::MatrixXd& D = basis.S_dual();

    std::vector<double> limits(n);
    for (std::size_t i = 0; i < n; ++i) {
        limits[i] = edge_limit(entries, n, i);
    }

    Eigen::MatrixXd out(k, k);
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (Eigen::Index c = 0; c < k; ++c) {
        // y = F W s~_c over off-diagonal entries, plus the delta term rho s~_c.
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = w[i] * D(static_cast<Eigen::Index>(i), c);
        }
        kernels::matvec(entries.data(), n, n, x.data(), y.data());
        for (std::size_t o = 0; o < n; ++o) {
            const double diag = entries[o * n + o];
            y[o] += diag * (D(static_cast<Eigen::Index>(o), c) - x[o]) + 0.5 * limits[o] * x[o];
        }
        for (Eigen::Index r = 0; r < k; ++r) {
            out(r, c) = kernels::weighted_dot(S.col(r).data(), y.data(), w.data(), n);
        }
    }
    return {std::move(out), basis.labels()};
}

ReducedRerad reduce_matrix(const SpectralReradMatrix& p, const SensitivityBasis& basis) {
    return reduce_matrix(p.entries(), p.grid(), basis);
}

Eigen::VectorXd apply_reduced(const ReducedRerad& p, const Eigen::VectorXd& incoming) {
    if (static_cast<std::size_t>(incoming.size()) != p.channels() || p.m.rows() != p.m.cols()) {
        throw std::invalid_argument("apply_reduced: dimension mismatch");
    }
    return p.m * incoming;
}

ReducedRerad compose_reduced(const ReducedRerad& reflectance, const ReducedRerad& fbar) {
    if (reflectance.channels() != fbar.channels()) {
        throw std::invalid_argument("compose_reduced: channel count mismatch");
    }
    const auto k = reflectance.m.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k, k);
    return {reflectance.m + fbar.m * (I - reflectance.m), reflectance.labels};
}

OutgoingSplit split_outgoing(const ReducedRerad& reflectance, const ReducedRerad& fbar, const Eigen::VectorXd& incoming) {
    if (reflectance.channels() != fbar.channels() || static_cast<std::size_t>(incoming.size()) != fbar.channels()) {
        throw std::invalid_argument("split_outgoing: dimension mismatch");
    }
    const Eigen::VectorXd reflected = reflectance.m * incoming;
    return {reflected, fbar.m * (incoming - reflected)};
}

Eigen::VectorXd outgoing_color_spectral(const SpectralReradMatrix& p, const Spectrum& light,
                                        const SensitivityBasis& sensors) {
    require_same_grid(p.grid(), light.grid());
    require_same_grid(p.grid(), sensors.grid());
    const std::size_t n = p.size();
    const auto w = p.grid().weights();
    const auto entries = p.entries();

    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = w[i] * light[i];
    }
    kernels::matvec(entries.data(), n, n, x.data(), y.data());
    for (std::size_t o = 0; o < n; ++o) {
        y[o] += entries[o * n + o] * (light[o] - x[o]) + 0.5 * edge_limit(entries, n, o) * x[o];
    }
    return sensors.project(y);
}

double decomposition_residual(const DecomposedRerad& d, const SensitivityBasis& basis) {
    const std::size_t n = d.rho.size();
    std::vector<double> refl(n * n, 0.0);
    std::vector<double> fluo(n * n, 0.0);
    for (std::size_t o = 0; o < n; ++o) {
        refl[o * n + o] = d.rho[o];
        for (std::size_t i = 0; i < o; ++i) {
            fluo[o * n + i] = d.fbar[o * n + i] * (1.0 - d.rho[i]);
        }
    }
    const auto R = reduce_matrix(refl, d.grid(), basis);
    const auto F = reduce_matrix(fluo, d.grid(), basis);
    const auto Fbar = reduce_matrix(d.fbar, d.grid(), basis);
    const auto k = R.m.rows();
    const Eigen::MatrixXd predicted = Fbar.m * (Eigen::MatrixXd::Identity(k, k) - R.m);
    return (F.m - predicted).cwiseAbs().maxCoeff();
}

LoadedRerad sanitize_measured(const WavelengthGrid& grid, std::vector<double> entries) {
    const std::size_t n = grid.size();
    if (entries.size() != n * n) {
        throw DataError("reradiation matrix must be N x N");
    }
    std::size_t zeroed = 0;
    std::size_t negative = 0;
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t i = 0; i < n; ++i) {
            double& v = entries[o * n + i];
            if (!std::isfinite(v)) {
                throw DataError("reradiation matrix contains non-finite values");
            }
            if (o < i) {
                if (v != 0.0) {
                    ++zeroed;
                    v = 0.0;
                }
            } else if (v < 0.0) {
                ++negative;
                v = 0.0;
            }
        }
    }
    return {SpectralReradMatrix(grid, std::move(entries)), zeroed, negative};
}

LoadedRerad read_bispec(std::istream& in) {
    std::string magic;
    std::string version;
    std::size_t n = 0;
    double lo = 0.0;
    double hi = 0.0;
    if (!(in >> magic >> version >> n >> lo >> hi) || magic != "BISPEC" || version != "v1") {
        throw DataError("not a BISPEC v1 file");
    }
    if (n < 2) {
        throw DataError("BISPEC matrix needs N >= 2");
    }
    const WavelengthGrid grid(lo, hi, (hi - lo) / static_cast<double>(n - 1));
    if (grid.size() != n) {
        throw DataError("BISPEC header describes an inconsistent grid");
    }
    std::vector<double> entries(n * n);
    for (auto& v : entries) {
        if (!(in >> v)) {
            throw DataError("BISPEC matrix is truncated");
        }
    }
    return sanitize_measured(grid, std::move(entries));
}

namespace {

std::vector<double> split_csv_numbers(const std::string& line, std::size_t skip_leading, std::size_t line_no) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    std::size_t index = 0;
    while (std::getline(ss, cell, ',')) {
        if (index++ < skip_leading) {
            continue;
        }
        try {
            out.push_back(std::stod(cell));
        } catch (const std::logic_error&) {
            throw DataError("reradiation CSV line " + std::to_string(line_no) + ": not a number");
        }
    }
    return out;
}

} // namespace

LoadedRerad read_bispec_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("reradiation CSV is empty");
    }
    const std::vector<double> in_wl = split_csv_numbers(line, 1, 1);
    const std::size_t n = in_wl.size();
    if (n < 2) {
        throw DataError("reradiation CSV header needs at least two wavelengths");
    }
    const WavelengthGrid grid(in_wl.front(), in_wl.back(), (in_wl.back() - in_wl.front()) / static_cast<double>(n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(grid[i] - in_wl[i]) > 1e-6) {
            throw DataError("reradiation CSV wavelengths must be uniformly spaced");
        }
    }
    std::vector<double> entries;
    entries.reserve(n * n);
    std::size_t row = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<double> cells = split_csv_numbers(line, 0, line_no);
        if (cells.size() != n + 1) {
            throw DataError("reradiation CSV line " + std::to_string(line_no) + ": wrong column count");
        }
        if (row >= n || std::abs(cells[0] - grid[row]) > 1e-6) {
            throw DataError("reradiation CSV line " + std::to_string(line_no) + ": unexpected lambda_o");
        }
        entries.insert(entries.end(), cells.begin() + 1, cells.end());
        ++row;
    }
    if (row != n) {
        throw DataError("reradiation CSV must have one row per wavelength");
    }
    return sanitize_measured(grid, std::move(entries));
}

LoadedRerad read_rerad(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open reradiation file " + path.string());
    }
    std::string first;
    in >> first;
    in.seekg(0);
    if (first == "BISPEC") {
        return read_bispec(in);
    }
    return read_bispec_csv(in);
}

void write_bispec(std::ostream& out, const SpectralReradMatrix& p) {
    const std::size_t n = p.size();
    std::ostringstream buf;
    buf.precision(17);
    buf << "BISPEC v1 " << n << ' ' << p.grid().min_nm() << ' ' << p.grid().max_nm() << '\n';
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i != 0) {
                buf << ' ';
            }
            buf << p.at(o, i);
        }
        buf << '\n';
    }
    out << buf.str();
}

} // namespace fluoro
