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


#include "fluoro/fitting.hpp"

#include "fluoro/basis.hpp"
#include "fluoro/error.hpp"
#include "fluoro/lm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fluoro {

namespace {

constexpr std::size_t kLobeParams = 5; // alpha, mu_a, sigma_a, mu_e, sigma_e

// Samples strictly above the diagonal, flattened.
struct UpperSamples {
    std::vector<std::uint32_t> out;
    std::vector<std::uint32_t> in;
    Eigen::VectorXd values;
};

UpperSamples upper_samples(std::span<const double> fbar, std::size_t n) {
    UpperSamples s;
    const std::size_t count = n * (n - 1) / 2;
    s.out.reserve(count);
    s.in.reserve(count);
    s.values.resize(static_cast<Eigen::Index>(count));
    Eigen::Index k = 0;
    for (std::size_t o = 1; o < n; ++o) {
        for (std::size_t i = 0; i < o; ++i) {
            s.out.push_back(static_cast<std::uint32_t>(o));
            s.in.push_back(static_cast<std::uint32_t>(i));
            s.values(k++) = fbar[o * n + i];
        }
    }
    return s;
}

Eigen::VectorXd pack(const std::vector<Gaussian2D>& lobes) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(lobes.size() * kLobeParams));
    for (std::size_t q = 0; q < lobes.size(); ++q) {
        const auto b = static_cast<Eigen::Index>(q * kLobeParams);
        p.segment<5>(b) << lobes[q].amplitude, lobes[q].mean_a, lobes[q].std_a, lobes[q].mean_e, lobes[q].std_e;
    }
    return p;
}

std::vector<Gaussian2D> unpack(const Eigen::VectorXd& p) {
    std::vector<Gaussian2D> lobes;
    for (Eigen::Index b = 0; b < p.size(); b += kLobeParams) {
        lobes.push_back({p(b), p(b + 1), p(b + 2), p(b + 3), p(b + 4)});
    }
    return lobes;
}

// Residual of a 2D Gaussian mixture on the upper samples.
class Fbar2DProblem {
public:
    Fbar2DProblem(const UpperSamples& data, const WavelengthGrid& grid) : data_(data), grid_(grid) {}

    void operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) const {
        const std::size_t n = grid_.size();
        const auto m = data_.values.size();
        r = -data_.values;
        if (J) {
            J->resize(m, p.size());
        }
        std::vector<double> a(n);
        std::vector<double> e(n);
        for (Eigen::Index b = 0; b < p.size(); b += kLobeParams) {
            const double alpha = p(b);
            const double mu_a = p(b + 1);
            const double s_a = p(b + 2);
            const double mu_e = p(b + 3);
            const double s_e = p(b + 4);
            for (std::size_t i = 0; i < n; ++i) {
                const double da = (grid_[i] - mu_a) / s_a;
                const double de = (grid_[i] - mu_e) / s_e;
                a[i] = std::exp(-0.5 * da * da);
                e[i] = std::exp(-0.5 * de * de);
            }
            for (Eigen::Index k = 0; k < m; ++k) {
                const std::size_t i = data_.in[static_cast<std::size_t>(k)];
                const std::size_t o = data_.out[static_cast<std::size_t>(k)];
                const double base = a[i] * e[o];
                const double v = alpha * base;
                r(k) += v;
                if (J) {
                    const double xa = grid_[i] - mu_a;
                    const double xe = grid_[o] - mu_e;
                    (*J)(k, b) = base;
                    (*J)(k, b + 1) = v * xa / (s_a * s_a);
                    (*J)(k, b + 2) = v * xa * xa / (s_a * s_a * s_a);
                    (*J)(k, b + 3) = v * xe / (s_e * s_e);
                    (*J)(k, b + 4) = v * xe * xe / (s_e * s_e * s_e);
                }
            }
        }
    }

private:
    const UpperSamples& data_;
    const WavelengthGrid& grid_;
};

// Mean and spread of the two marginals of a non-negative upper-triangular
// mass, plus its peak.
Gaussian2D moment_lobe(const UpperSamples& s, const Eigen::VectorXd& values, const WavelengthGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> ma(n, 0.0);
    std::vector<double> me(n, 0.0);
    double peak = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double v = std::max(values(k), 0.0);
        ma[s.in[static_cast<std::size_t>(k)]] += v;
        me[s.out[static_cast<std::size_t>(k)]] += v;
        peak = std::max(peak, v);
    }
    auto moments = [&](const std::vector<double>& w, double& mean, double& spread) {
        double sum = 0.0;
        double first = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += w[i];
            first += w[i] * grid[i];
        }
        mean = sum > 0.0 ? first / sum : 0.5 * (grid.min_nm() + grid.max_nm());
        double second = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            second += w[i] * (grid[i] - mean) * (grid[i] - mean);
        }
        spread = sum > 0.0 ? std::sqrt(second / sum) : 50.0;
        spread = std::clamp(spread, 2.0, 300.0);
    };
    Gaussian2D g;
    g.amplitude = peak;
    moments(ma, g.mean_a, g.std_a);
    moments(me, g.mean_e, g.std_e);
    return g;
}

struct LevelFit {
    std::vector<Gaussian2D> lobes;
    double cost = 0.0;
};

LevelFit run_2d(const Fbar2DProblem& problem, const std::vector<Gaussian2D>& init, const FitConfig& config,
                const WavelengthGrid& grid) {
    const auto p0 = pack(init);
    Eigen::VectorXd lo(p0.size());
    Eigen::VectorXd hi(p0.size());
    const double mean_lo = std::max(kMinMeanNm, grid.min_nm());
    const double mean_hi = std::min(kMaxMeanNm, grid.max_nm());
    for (Eigen::Index b = 0; b < p0.size(); b += kLobeParams) {
        lo.segment<5>(b) << 0.0, mean_lo, kMinSpreadNm, mean_lo, kMinSpreadNm;
        hi.segment<5>(b) << 1e6, mean_hi, kMaxSpreadNm, mean_hi, kMaxSpreadNm;
    }
    LmOptions opt;
    opt.max_iterations = config.max_iterations;
    opt.cost_tolerance = config.tolerance;
    const auto res = levenberg_marquardt(std::cref(problem), p0, opt, lo, hi);
    return {unpack(res.params), res.cost};
}

Eigen::VectorXd mixture_values(const UpperSamples& s, const std::vector<Gaussian2D>& lobes, const WavelengthGrid& grid) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(s.values.size());
    for (const auto& g : lobes) {
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            v(k) += g(grid[s.in[static_cast<std::size_t>(k)]], grid[s.out[static_cast<std::size_t>(k)]]);
        }
    }
    return v;
}

// 1D Gaussian mixture residual over all grid samples.
class Mixture1DProblem {
public:
    Mixture1DProblem(const Spectrum& target) : target_(target) {}

    void operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) const {
        const auto& grid = target_.grid();
        const auto n = static_cast<Eigen::Index>(grid.size());
        r.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            r(i) = -target_[static_cast<std::size_t>(i)];
        }
        if (J) {
            J->resize(n, p.size());
        }
        for (Eigen::Index b = 0; b < p.size(); b += 3) {
            const double amp = p(b);
            const double mu = p(b + 1);
            const double s = p(b + 2);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double x = grid[static_cast<std::size_t>(i)] - mu;
                const double base = std::exp(-0.5 * x * x / (s * s));
                const double v = amp * base;
                r(i) += v;
                if (J) {
                    (*J)(i, b) = base;
                    (*J)(i, b + 1) = v * x / (s * s);
                    (*J)(i, b + 2) = v * x * x / (s * s * s);
                }
            }
        }
    }

private:
    const Spectrum& target_;
};

std::vector<Gaussian1D> run_1d(const Spectrum& target, std::vector<Gaussian1D> init, double& rms) {
    const auto& grid = target.grid();
    const auto m = static_cast<Eigen::Index>(init.size());
    Eigen::VectorXd p0(3 * m);
    Eigen::VectorXd lo(3 * m);
    Eigen::VectorXd hi(3 * m);
    for (Eigen::Index q = 0; q < m; ++q) {
        const auto& g = init[static_cast<std::size_t>(q)];
        p0.segment<3>(3 * q) << g.amplitude, g.mean, g.std;
        lo.segment<3>(3 * q) << 0.0, grid.min_nm() - 200.0, kMinSpreadNm;
        hi.segment<3>(3 * q) << 1e3, grid.max_nm() + 200.0, kMaxSpreadNm;
    }
    const Mixture1DProblem problem(target);
    LmOptions opt;
    opt.max_iterations = 500;
    const auto res = levenberg_marquardt(std::cref(problem), p0, opt, lo, hi);
    std::vector<Gaussian1D> out;
    for (Eigen::Index q = 0; q < m; ++q) {
        out.push_back({res.params(3 * q), res.params(3 * q + 1), res.params(3 * q + 2)});
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.mean < y.mean; });
    rms = std::sqrt(2.0 * res.cost / static_cast<double>(grid.size()));
    return out;
}

} // namespace

FluorescenceFit fit_fluorescence(std::span<const double> fbar, const WavelengthGrid& grid, const FitConfig& config) {
    const std::size_t n = grid.size();
    if (fbar.size() != n * n) {
        throw std::invalid_argument("fit_fluorescence: matrix must be N x N");
    }
    if (config.q < 1 || config.q > kMaxLobes) {
        throw std::invalid_argument("fit_fluorescence: Q must lie in [1, 4]");
    }
    if (!(config.tolerance > 0.0)) {
        throw std::invalid_argument("fit_fluorescence: tolerance must be positive");
    }
    const UpperSamples data = upper_samples(fbar, n);
    const double count = static_cast<double>(data.values.size());
    FluorescenceFit fit;
    if (data.values.cwiseAbs().maxCoeff() == 0.0) {
        const double mid = 0.5 * (grid.min_nm() + grid.max_nm());
        fit.lobes.assign(config.q, Gaussian2D{0.0, mid, 50.0, mid, 50.0});
        fit.trivial = true;
        return fit;
    }

    const Fbar2DProblem problem(data, grid);
    LevelFit best = run_2d(problem, {moment_lobe(data, data.values, grid)}, config, grid);

    for (std::size_t q = 2; q <= config.q; ++q) {
        const Eigen::VectorXd residual = data.values - mixture_values(data, best.lobes, grid);
        const Gaussian2D fresh = moment_lobe(data, residual, grid);
        LevelFit level;
        bool have = false;
        for (std::size_t s = 0; s < std::max<std::size_t>(1, config.starts); ++s) {
            Gaussian2D start = fresh;
            if (s > 0) {
                std::mt19937_64 rng(config.seed + s);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                start.mean_a += u(rng) * start.std_a;
                start.mean_e += u(rng) * start.std_e;
                start.std_a *= std::exp(0.5 * u(rng));
                start.std_e *= std::exp(0.5 * u(rng));
            }
            auto init = best.lobes;
            init.push_back(start);
            LevelFit trial = run_2d(problem, init, config, grid);
            if (!have || trial.cost < level.cost) { // ties keep the lower seed
                level = std::move(trial);
                have = true;
            }
        }
        if (level.cost > best.cost) {
            level = best;
            level.lobes.push_back({0.0, fresh.mean_a, fresh.std_a, fresh.mean_e, fresh.std_e});
        }
        best = std::move(level);
    }
    fit.lobes = std::move(best.lobes);
    fit.rms = std::sqrt(2.0 * best.cost / count);
    return fit;
}

DiagonalFit fit_diagonal(const Spectrum& rho, std::size_t count) {
    if (count == 0) {
        throw std::invalid_argument("fit_diagonal: need at least one Gaussian");
    }
    const auto& grid = rho.grid();
    DiagonalFit fit;
    const double spacing = (grid.max_nm() - grid.min_nm()) / static_cast<double>(count);
    bool all_zero = true;
    for (double v : rho.values()) {
        all_zero = all_zero && v == 0.0;
    }
    std::vector<Gaussian1D> init;
    for (std::size_t k = 0; k < count; ++k) {
        const double mu = grid.min_nm() + (static_cast<double>(k) + 0.5) * spacing;
        init.push_back({std::max(rho[grid.nearest_index(mu)], 0.0) / 1.5, mu, 0.6 * spacing});
    }
    if (all_zero) {
        for (auto& g : init) {
            g.amplitude = 0.0;
        }
        fit.model.gaussians = std::move(init);
        return fit;
    }
    fit.model.gaussians = run_1d(rho, std::move(init), fit.rms);
    return fit;
}

CmfFit fit_cmf(const Spectrum& cmf, std::size_t count) {
    if (count == 0) {
        throw std::invalid_argument("fit_cmf: need at least one Gaussian");
    }
    const auto& grid = cmf.grid();
    const std::size_t n = grid.size();
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = cmf[i];
        const bool left = i == 0 || v >= cmf[i - 1];
        const bool right = i + 1 == n || v > cmf[i + 1];
        if (v > 0.0 && left && right) {
            peaks.push_back(i);
        }
    }
    if (peaks.empty()) {
        throw DataError("fit_cmf: colour matching function has no positive peak");
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return cmf[a] > cmf[b]; });

    std::vector<Gaussian1D> init;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t p = peaks[k % peaks.size()];
        const double half = 0.5 * cmf[p];
        std::size_t lo = p;
        std::size_t hi = p;
        while (lo > 0 && cmf[lo] > half) {
            --lo;
        }
        while (hi + 1 < n && cmf[hi] > half) {
            ++hi;
        }
        const double hwhm = std::max(std::min(grid[p] - grid[lo], grid[hi] - grid[p]), 2.0 * grid.step_nm());
        // repeated peaks (more lobes than maxima) start off to the side
        const double shift = static_cast<double>(k / peaks.size()) * hwhm;
        init.push_back({cmf[p], grid[p] + shift, hwhm / std::sqrt(2.0 * std::log(2.0))});
    }
    CmfFit fit;
    fit.gaussians = run_1d(cmf, std::move(init), fit.rms);
    return fit;
}

MaterialFit fit_material(const SpectralReradMatrix& p, const FitConfig& config) {
    MaterialFit out;
    const DecomposedRerad d = decompose(p);
    out.clamped_diagonal = d.clamped;
    out.fluorescence = fit_fluorescence(d.fbar, d.grid(), config);
    out.diagonal = fit_diagonal(d.rho);

    const SensitivityBasis xyz = xyz_basis(d.grid());
    const Eigen::VectorXd albedo = xyz.albedo_scale() * xyz.project(d.rho.values());
    for (int c = 0; c < 3; ++c) {
        out.material.albedo_xyz(c) = std::clamp(albedo(c), 0.0, 1.0);
    }
    out.material.lobes.clear();
    for (const auto& g : out.fluorescence.lobes) {
        double bar = g.amplitude / alpha_max_conservative(g.mean_e, g.std_e);
        if (bar > 1.0) {
            bar = 1.0;
            ++out.clamped_lobes;
        }
        out.material.lobes.push_back({bar, g.mean_a, std::max(g.std_a, kMinSpreadNm), g.mean_e,
                                      std::max(g.std_e, kMinSpreadNm)});
    }
    double strength = 0.0;
    for (const auto& l : out.material.lobes) {
        strength += l.alpha_bar;
    }
    if (strength > 1.0) {
        for (auto& l : out.material.lobes) {
            l.alpha_bar /= strength;
        }
        out.clamped_lobes = out.material.lobes.size();
    }
    out.material.diagonal = out.diagonal.model;
    out.material.notes = "fitted, Q=" + std::to_string(config.q);
    return out;
}

FluorescentMaterial interpolate_materials(const FluorescentMaterial& a, const FluorescentMaterial& b, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument("interpolation parameter must lie in [0, 1]");
    }
    std::vector<FluoLobe> la = a.lobes;
    std::vector<FluoLobe> lb = b.lobes;
    while (la.size() < lb.size()) {
        FluoLobe pad = lb[la.size()];
        pad.alpha_bar = 0.0;
        la.push_back(pad);
    }
    while (lb.size() < la.size()) {
        FluoLobe pad = la[lb.size()];
        pad.alpha_bar = 0.0;
        lb.push_back(pad);
    }
    auto mix = [t](double x, double y) { return t == 0.0 ? x : t == 1.0 ? y : x + t * (y - x); };
    FluorescentMaterial out = a;
    out.lobes.clear();
    for (std::size_t q = 0; q < la.size(); ++q) {
        out.lobes.push_back({mix(la[q].alpha_bar, lb[q].alpha_bar), mix(la[q].mu_a, lb[q].mu_a),
                             mix(la[q].sigma_a, lb[q].sigma_a), mix(la[q].mu_e, lb[q].mu_e),
                             mix(la[q].sigma_e, lb[q].sigma_e)});
    }
    return out;
}

} // namespace fluoro
