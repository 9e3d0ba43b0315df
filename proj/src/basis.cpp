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
#include "fluoro/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fluoro {

namespace {

std::vector<std::string> default_labels(std::size_t k) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) {
        labels.push_back("c" + std::to_string(i));
    }
    return labels;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& S, const WavelengthGrid& grid) {
    const auto k = S.cols();
    Eigen::MatrixXd gram(k, k);
    const double* w = grid.weights().data();
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = a; b < k; ++b) {
            gram(a, b) = kernels::weighted_dot(S.col(a).data(), S.col(b).data(), w, grid.size());
            gram(b, a) = gram(a, b);
        }
    }
    return gram;
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

void hash_double(std::uint64_t& h, double v) { hash_bytes(h, &v, sizeof v); }

} // namespace

SensitivityBasis::SensitivityBasis(WavelengthGrid grid, std::vector<Gaussian1D> atoms, Eigen::MatrixXd transfer,
                                   Eigen::MatrixXd S, std::vector<std::string> labels)
    : grid_(std::move(grid)), atoms_(std::move(atoms)), transfer_(std::move(transfer)), S_(std::move(S)),
      labels_(std::move(labels)) {
    const auto k = static_cast<std::size_t>(S_.cols());
    if (k == 0) {
        throw std::invalid_argument("basis needs at least one channel");
    }
    if (labels_.empty()) {
        labels_ = default_labels(k);
    }
    if (labels_.size() != k) {
        throw std::invalid_argument("basis label count does not match channel count");
    }

    gram_ = weighted_gram(S_, grid_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || !(lo > 1e-12 * hi)) {
        throw DataError("sensitivity basis is rank deficient (S^T S is singular)");
    }
    C_ = gram_.inverse();
    C_ = 0.5 * (C_ + C_.transpose());
    S_dual_ = S_ * C_;

    const auto it = std::find(labels_.begin(), labels_.end(), "Y");
    luminance_ = it == labels_.end() ? 0 : static_cast<std::size_t>(it - labels_.begin());
    const double y_integral = S_.col(static_cast<Eigen::Index>(luminance_)).dot(
        Eigen::Map<const Eigen::VectorXd>(grid_.weights().data(), static_cast<Eigen::Index>(grid_.size())));
    if (!(std::abs(y_integral) > 0.0)) {
        throw DataError("luminance sensitivity integrates to zero");
    }
    albedo_scale_ = 1.0 / y_integral;

    // R_k = S^T W diag(S~_k / scale) S~
    const auto n = static_cast<Eigen::Index>(grid_.size());
    const Eigen::Map<const Eigen::VectorXd> w(grid_.weights().data(), n);
    R_k_.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        const Eigen::VectorXd diag = w.cwiseProduct(S_dual_.col(static_cast<Eigen::Index>(c))) / albedo_scale_;
        R_k_.emplace_back(S_.transpose() * diag.asDiagonal() * S_dual_);
    }
}

double SensitivityBasis::dual_identity_error() const {
    const auto k = static_cast<Eigen::Index>(channels());
    Eigen::MatrixXd m(k, k);
    const double* w = grid_.weights().data();
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            m(a, b) = kernels::weighted_dot(S_.col(a).data(), S_dual_.col(b).data(), w, grid_.size());
        }
    }
    return (m - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
}

std::string SensitivityBasis::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    hash_double(h, grid_.min_nm());
    hash_double(h, grid_.max_nm());
    hash_double(h, grid_.step_nm());
    for (const auto& a : atoms_) {
        hash_double(h, a.amplitude);
        hash_double(h, a.mean);
        hash_double(h, a.std);
    }
    for (Eigen::Index i = 0; i < transfer_.size(); ++i) {
        hash_double(h, transfer_.data()[i]);
    }
    if (atoms_.empty()) {
        for (Eigen::Index i = 0; i < S_.size(); ++i) {
            hash_double(h, S_.data()[i]);
        }
    }
    for (const auto& l : labels_) {
        hash_bytes(h, l.data(), l.size());
        hash_bytes(h, "\0", 1);
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

Eigen::VectorXd SensitivityBasis::project(std::span<const double> values) const {
    if (values.size() != grid_.size()) {
        throw DataError("spectrum grid does not match basis grid");
    }
    const auto k = static_cast<Eigen::Index>(channels());
    Eigen::VectorXd out(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        out(c) = kernels::weighted_dot(S_.col(c).data(), values.data(), grid_.weights().data(), grid_.size());
    }
    return out;
}

SensitivityBasis build_basis(const std::vector<Gaussian1D>& atoms, const Eigen::MatrixXd& transfer,
                             const WavelengthGrid& grid, std::vector<std::string> labels) {
    const auto m = static_cast<Eigen::Index>(atoms.size());
    if (m == 0) {
        throw std::invalid_argument("basis needs at least one atom");
    }
    if (transfer.rows() != m || transfer.cols() < 1 || transfer.cols() > m) {
        throw std::invalid_argument("transfer matrix must be M x K with K <= M");
    }
    for (const auto& a : atoms) {
        if (!(a.std > 0.0)) {
            throw std::invalid_argument("basis atoms need a positive standard deviation");
        }
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd G(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto& g = atoms[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < n; ++i) {
            G(i, j) = g(grid[static_cast<std::size_t>(i)]);
        }
    }
    Eigen::MatrixXd S = G * transfer;
    return SensitivityBasis(grid, atoms, transfer, std::move(S), std::move(labels));
}

SensitivityBasis tabulated_basis(const Eigen::MatrixXd& S, const WavelengthGrid& grid, std::vector<std::string> labels) {
    if (static_cast<std::size_t>(S.rows()) != grid.size()) {
        throw std::invalid_argument("tabulated basis rows must match the grid");
    }
    return SensitivityBasis(grid, {}, Eigen::MatrixXd(), S, std::move(labels));
}

Eigen::MatrixXd xyzu_transfer() {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(5, 4);
    t(0, 0) = 1.0;
    t(1, 0) = 1.0;
    t(2, 1) = 1.0;
    t(3, 2) = 1.0;
    t(4, 3) = 1.0;
    return t;
}

SensitivityBasis xyz_basis(const WavelengthGrid& grid) {
    using namespace xyzu_atoms;
    const Eigen::MatrixXd t = xyzu_transfer().topLeftCorner(4, 3);
    return build_basis({kXBarShort, kXBarLong, kYBar, kZBar}, t, grid, {"X", "Y", "Z"});
}

SensitivityBasis xyzu_basis(const WavelengthGrid& grid, const Gaussian1D& uv) {
    using namespace xyzu_atoms;
    return build_basis({kXBarShort, kXBarLong, kYBar, kZBar, uv}, xyzu_transfer(), grid, {"X", "Y", "Z", "U"});
}

SensitivityBasis basis_by_name(const std::string& name, const WavelengthGrid& grid) {
    if (name == "xyz") {
        return xyz_basis(grid);
    }
    if (name == "xyzu") {
        return xyzu_basis(grid);
    }
    throw std::invalid_argument("unknown basis '" + name + "' (expected xyz or xyzu)");
}

SensitivityBasis read_basis_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
        std::vector<Gaussian1D> atoms;
        for (const auto& a : j.at("atoms")) {
            atoms.push_back({a.at("amplitude").get<double>(), a.at("mean_nm").get<double>(), a.at("std_nm").get<double>()});
        }
        const auto& rows = j.at("transfer");
        if (rows.size() != atoms.size() || rows.empty()) {
            throw DataError("basis descriptor: transfer must have one row per atom");
        }
        const auto k = rows.front().size();
        Eigen::MatrixXd t(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != k) {
                throw DataError("basis descriptor: ragged transfer matrix");
            }
            for (std::size_t c = 0; c < k; ++c) {
                t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
            }
        }
        const auto& g = j.at("grid");
        const WavelengthGrid grid(g.at("min").get<double>(), g.at("max").get<double>(), g.at("step").get<double>());
        std::vector<std::string> labels;
        if (j.contains("labels")) {
            labels = j.at("labels").get<std::vector<std::string>>();
        }
        return build_basis(atoms, t, grid, std::move(labels));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("basis descriptor: ") + e.what());
    }
}

void write_basis_json(std::ostream& out, const SensitivityBasis& basis) {
    nlohmann::json j;
    j["atoms"] = nlohmann::json::array();
    for (const auto& a : basis.atoms()) {
        j["atoms"].push_back({{"amplitude", a.amplitude}, {"mean_nm", a.mean}, {"std_nm", a.std}});
    }
    j["transfer"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < basis.transfer().rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < basis.transfer().cols(); ++c) {
            row.push_back(basis.transfer()(r, c));
        }
        j["transfer"].push_back(row);
    }
    j["grid"] = {{"min", basis.grid().min_nm()}, {"max", basis.grid().max_nm()}, {"step", basis.grid().step_nm()}};
    j["labels"] = basis.labels();
    out << j.dump(2) << '\n';
}

} // namespace fluoro
