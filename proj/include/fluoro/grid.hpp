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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace fluoro {

/// Uniform wavelength sampling in nanometres, both endpoints included.
///
/// The last sample is clamped to `max_nm()` when the range is not an exact
/// multiple of the step. Trapezoidal weights are derived from the actual
/// sample positions, so a clamped tail gets a shorter interval.
class WavelengthGrid {
public:
    WavelengthGrid(double lambda_min, double lambda_max, double step);

    double min_nm() const { return min_; }
    double max_nm() const { return max_; }
    double step_nm() const { return step_; }
    std::size_t size() const { return samples_.size(); }

    double operator[](std::size_t i) const { return samples_[i]; }
    std::span<const double> samples() const { return samples_; }
    std::span<const double> weights() const { return weights_; }

    /// Index of the sample closest to `lambda`, clamped to the grid.
    std::size_t nearest_index(double lambda) const;

    bool operator==(const WavelengthGrid& other) const;

private:
    double min_;
    double max_;
    double step_;
    std::vector<double> samples_;
    std::vector<double> weights_;
};

WavelengthGrid make_grid(double lambda_min, double lambda_max, double step);

/// 300-800 nm at 1 nm.
WavelengthGrid default_grid();

/// Tabulated function over a wavelength grid.
class Spectrum {
public:
    Spectrum(WavelengthGrid grid, std::vector<double> values);
    explicit Spectrum(WavelengthGrid grid); // zero-filled

    const WavelengthGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    /// Trapezoidal integral over the grid.
    double integral() const;

    /// True when every value lies in [0, 1].
    bool is_reflectance() const;

private:
    WavelengthGrid grid_;
    std::vector<double> values_;
};

/// Trapezoidal inner product of two sample vectors on `grid`.
double inner_product(const WavelengthGrid& grid, std::span<const double> a, std::span<const double> b);

/// A raw (wavelength, value) table as stored on disk.
struct SpectrumTable {
    std::vector<double> wavelengths;
    std::vector<double> values;
};

/// Parses the two-column `wavelength_nm,value` CSV format (header row
/// required). Wavelengths must be strictly increasing.
SpectrumTable read_spectrum_csv(std::istream& in);
SpectrumTable read_spectrum_csv(const std::filesystem::path& path);
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

/// Linear interpolation of a table onto a grid; zero outside the table range.
Spectrum resample(const SpectrumTable& table, const WavelengthGrid& grid);

} // namespace fluoro
