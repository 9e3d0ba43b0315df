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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fluoro {

/// 8-bit RGB, rows top to bottom.
struct ImageRGB8 {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels; // width * height * 3

    ImageRGB8() = default;
    ImageRGB8(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h * 3, 0) {}
    std::uint8_t* at(std::size_t x, std::size_t y) { return pixels.data() + 3 * (y * width + x); }
    const std::uint8_t* at(std::size_t x, std::size_t y) const { return pixels.data() + 3 * (y * width + x); }
    bool operator==(const ImageRGB8&) const = default;
};

/// Three-channel float image, rows top to bottom.
struct ImageF {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<float> pixels; // width * height * 3

    ImageF() = default;
    ImageF(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h * 3, 0.0f) {}
    float* at(std::size_t x, std::size_t y) { return pixels.data() + 3 * (y * width + x); }
    const float* at(std::size_t x, std::size_t y) const { return pixels.data() + 3 * (y * width + x); }
    bool operator==(const ImageF&) const = default;
};

// Binary PPM (P6, maxval 255).
void write_ppm(std::ostream& out, const ImageRGB8& img);
void write_ppm(const std::filesystem::path& path, const ImageRGB8& img);
std::string encode_ppm(const ImageRGB8& img);
ImageRGB8 read_ppm(std::istream& in);
ImageRGB8 read_ppm(const std::filesystem::path& path);

// PFM, little endian, stored bottom row first as the format requires. The
// reader also accepts single-channel "Pf" files (replicated to RGB) and
// big-endian files.
void write_pfm(std::ostream& out, const ImageF& img);
void write_pfm(const std::filesystem::path& path, const ImageF& img);
ImageF read_pfm(std::istream& in);
ImageF read_pfm(const std::filesystem::path& path);

/// PFM or PPM by extension (.pfm, .ppm); PPM values are scaled to [0, 1].
ImageF read_texture(const std::filesystem::path& path);

} // namespace fluoro
