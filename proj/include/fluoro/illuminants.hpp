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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace fluoro {

/// Asset directory: $FLUORO_DATA_DIR when set, otherwise the path compiled
/// into the library.
std::filesystem::path data_dir();

/// Tabulated CIE 2006 2-degree colour matching functions resampled on `grid`
/// (zero outside the table). Columns x, y, z.
SensitivityBasis cie2006_basis(const WavelengthGrid& grid = default_grid(),
                               const std::filesystem::path& dir = data_dir());
Spectrum load_cmf(const std::string& channel, const WavelengthGrid& grid = default_grid(),
                  const std::filesystem::path& dir = data_dir());

struct Illuminant {
    std::string name;
    Spectrum spd; // relative power, mean value 1 over the grid
};

/// Gaussian stand-in for an ultraviolet lamp.
inline constexpr double kUvLampMean = 370.0;
inline constexpr double kUvLampStd = 20.0;

/// Named illuminants on one grid. E and UV are built in; every
/// `<dir>/illuminants/NAME.csv` adds NAME. All spectra are scaled to unit
/// mean over the grid so different lights deliver the same power.
class IlluminantRegistry {
public:
    explicit IlluminantRegistry(const WavelengthGrid& grid = default_grid(),
                                const std::filesystem::path& dir = data_dir());

    const WavelengthGrid& grid() const { return grid_; }
    std::vector<std::string> names() const;
    bool contains(const std::string& name) const;

    /// Throws DataError for unknown names.
    const Illuminant& get(const std::string& name) const;

    /// c_i = S^T W L, cached per basis hash.
    Eigen::VectorXd color(const std::string& name, const SensitivityBasis& basis) const;

    void add(const std::string& name, const Spectrum& spd);

private:
    WavelengthGrid grid_;
    std::map<std::string, Illuminant> items_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<std::string, std::string>, Eigen::VectorXd> cache_;
};

/// The eight named lights used by the evaluation harness.
const std::vector<std::string>& evaluation_illuminants();

} // namespace fluoro
