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


#include "fluoro/grid.hpp"

#include "fluoro/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fluoro {

WavelengthGrid::WavelengthGrid(double lambda_min, double lambda_max, double step)
    : min_(lambda_min), max_(lambda_max), step_(step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("wavelength grid step must be positive");
    }
    if (!(lambda_min < lambda_max) || !std::isfinite(lambda_min) || !std::isfinite(lambda_max)) {
        throw std::invalid_argument("wavelength grid range is empty or inverted");
    }
    const auto n = static_cast<std::size_t>(std::llround((lambda_max - lambda_min) / step)) + 1;
    if (n < 2) {
        throw std::invalid_argument("wavelength grid needs at least two samples");
    }
    samples_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        samples_[i] = std::min(lambda_min + static_cast<double>(i) * step, lambda_max);
    }
    samples_.back() = lambda_max;
    for (std::size_t i = 1; i < n; ++i) {
        if (!(samples_[i] > samples_[i - 1])) {
            throw std::invalid_argument("wavelength grid samples are not strictly increasing");
        }
    }

    weights_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double half = 0.5 * (samples_[i + 1] - samples_[i]);
        weights_[i] += half;
        weights_[i + 1] += half;
    }
}

std::size_t WavelengthGrid::nearest_index(double lambda) const {
    if (lambda <= samples_.front()) {
        return 0;
    }
    if (lambda >= samples_.back()) {
        return samples_.size() - 1;
    }
    const auto it = std::lower_bound(samples_.begin(), samples_.end(), lambda);
    const auto hi = static_cast<std::size_t>(it - samples_.begin());
    const std::size_t lo = hi - 1;
    return (lambda - samples_[lo] <= samples_[hi] - lambda) ? lo : hi;
}

bool WavelengthGrid::operator==(const WavelengthGrid& other) const {
    return min_ == other.min_ && max_ == other.max_ && step_ == other.step_;
}

WavelengthGrid make_grid(double lambda_min, double lambda_max, double step) {
    return WavelengthGrid(lambda_min, lambda_max, step);
}

WavelengthGrid default_grid() { return WavelengthGrid(300.0, 800.0, 1.0); }

Spectrum::Spectrum(WavelengthGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("spectrum length does not match its grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DataError("spectrum contains non-finite values");
        }
    }
}

Spectrum::Spectrum(WavelengthGrid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

double Spectrum::integral() const {
    const auto w = grid_.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        sum += w[i] * values_[i];
    }
    return sum;
}

bool Spectrum::is_reflectance() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

double inner_product(const WavelengthGrid& grid, std::span<const double> a, std::span<const double> b) {
    if (a.size() != grid.size() || b.size() != grid.size()) {
        throw std::invalid_argument("inner_product: length mismatch");
    }
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += w[i] * a[i] * b[i];
    }
    return sum;
}

SpectrumTable read_spectrum_csv(std::istream& in) {
    SpectrumTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("spectrum CSV is empty");
    }
    if (line.find_first_of("0123456789") == 0) {
        throw DataError("spectrum CSV is missing its header row");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DataError("spectrum CSV line " + std::to_string(line_no) + ": expected two columns");
        }
        try {
            std::size_t used = 0;
            const double wl = std::stod(line.substr(0, comma), &used);
            const double v = std::stod(line.substr(comma + 1));
            if (!table.wavelengths.empty() && !(wl > table.wavelengths.back())) {
                throw DataError("spectrum CSV line " + std::to_string(line_no) + ": wavelengths must increase");
            }
            table.wavelengths.push_back(wl);
            table.values.push_back(v);
        } catch (const std::logic_error&) {
            throw DataError("spectrum CSV line " + std::to_string(line_no) + ": not a number");
        }
    }
    if (table.wavelengths.size() < 2) {
        throw DataError("spectrum CSV needs at least two samples");
    }
    return table;
}

SpectrumTable read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open spectrum file " + path.string());
    }
    return read_spectrum_csv(in);
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
    out << "wavelength_nm,value\n";
    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        line.str({});
        line << spectrum.grid()[i] << ',' << spectrum[i] << '\n';
        out << line.str();
    }
}

Spectrum resample(const SpectrumTable& table, const WavelengthGrid& grid) {
    std::vector<double> values(grid.size(), 0.0);
    const auto& wl = table.wavelengths;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        if (x < wl.front() || x > wl.back()) {
            continue;
        }
        auto it = std::upper_bound(wl.begin(), wl.end(), x);
        if (it == wl.end()) {
            values[i] = table.values.back();
            continue;
        }
        const auto hi = static_cast<std::size_t>(it - wl.begin());
        const std::size_t lo = hi - 1;
        const double t = (x - wl[lo]) / (wl[hi] - wl[lo]);
        values[i] = table.values[lo] + t * (table.values[hi] - table.values[lo]);
    }
    return Spectrum(grid, std::move(values));
}

} // namespace fluoro
