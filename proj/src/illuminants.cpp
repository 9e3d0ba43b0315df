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


#include "fluoro/illuminants.hpp"

#include "fluoro/color.hpp"
#include "fluoro/error.hpp"

#include <cstdlib>

#ifndef FLUORO_DEFAULT_DATA_DIR
#define FLUORO_DEFAULT_DATA_DIR "data"
#endif

namespace fluoro {

namespace fs = std::filesystem;

namespace {

Spectrum unit_mean(Spectrum s, const std::string& name) {
    const double width = s.grid().max_nm() - s.grid().min_nm();
    const double total = s.integral();
    if (!(total > 0.0)) {
        throw DataError("illuminant " + name + " has no power on the grid");
    }
    for (auto& v : s.values()) {
        if (v < 0.0) {
            throw DataError("illuminant " + name + " has negative power");
        }
        v *= width / total;
    }
    return s;
}

} // namespace

fs::path data_dir() {
    if (const char* env = std::getenv("FLUORO_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return FLUORO_DEFAULT_DATA_DIR;
}

Spectrum load_cmf(const std::string& channel, const WavelengthGrid& grid, const fs::path& dir) {
    const fs::path path = dir / "cmf" / ("cie2006_2deg_" + channel + "bar.csv");
    if (!fs::exists(path)) {
        throw DataError("missing colour matching function table " + path.string());
    }
    return resample(read_spectrum_csv(path), grid);
}

SensitivityBasis cie2006_basis(const WavelengthGrid& grid, const fs::path& dir) {
    Eigen::MatrixXd S(static_cast<Eigen::Index>(grid.size()), 3);
    const char* names[] = {"x", "y", "z"};
    for (Eigen::Index c = 0; c < 3; ++c) {
        const Spectrum s = load_cmf(names[c], grid, dir);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            S(static_cast<Eigen::Index>(i), c) = s[i];
        }
    }
    return tabulated_basis(S, grid, {"X", "Y", "Z"});
}

IlluminantRegistry::IlluminantRegistry(const WavelengthGrid& grid, const fs::path& dir) : grid_(grid) {
    add("E", Spectrum(grid, std::vector<double>(grid.size(), 1.0)));
    add("UV", discretize({1.0, kUvLampMean, kUvLampStd}, grid));
    const fs::path sub = dir / "illuminants";
    if (fs::is_directory(sub)) {
        for (const auto& entry : fs::directory_iterator(sub)) {
            if (entry.path().extension() == ".csv") {
                add(entry.path().stem().string(), resample(read_spectrum_csv(entry.path()), grid));
            }
        }
    }
}

std::vector<std::string> IlluminantRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : items_) {
        out.push_back(name);
    }
    return out;
}

bool IlluminantRegistry::contains(const std::string& name) const { return items_.contains(name); }

const Illuminant& IlluminantRegistry::get(const std::string& name) const {
    const auto it = items_.find(name);
    if (it == items_.end()) {
        throw DataError("unknown illuminant '" + name + "'");
    }
    return it->second;
}

Eigen::VectorXd IlluminantRegistry::color(const std::string& name, const SensitivityBasis& basis) const {
    const auto key = std::make_pair(name, basis.hash());
    {
        std::lock_guard lock(cache_mutex_);
        if (const auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }
    Eigen::VectorXd c = illuminant_to_color(get(name).spd, basis);
    std::lock_guard lock(cache_mutex_);
    cache_.emplace(key, c);
    return c;
}

void IlluminantRegistry::add(const std::string& name, const Spectrum& spd) {
    if (!(spd.grid() == grid_)) {
        throw DataError("illuminant " + name + " is on a different grid");
    }
    items_.insert_or_assign(name, Illuminant{name, unit_mean(spd, name)});
    std::lock_guard lock(cache_mutex_);
    std::erase_if(cache_, [&](const auto& kv) { return kv.first.first == name; });
}

const std::vector<std::string>& evaluation_illuminants() {
    static const std::vector<std::string> names{"E", "A", "D50", "D65", "D75", "FL2", "FL7", "FL11"};
    return names;
}

} // namespace fluoro
