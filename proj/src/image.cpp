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


#include "fluoro/image.hpp"

#include "fluoro/error.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fluoro {

namespace {

// Next whitespace-delimited header token, skipping # comments.
std::string header_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (in) {
        if (c == '#') {
            while (in && c != '\n') {
                c = in.get();
            }
        } else if (std::isspace(c)) {
            if (!tok.empty()) {
                return tok;
            }
        } else {
            tok.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return tok;
}

std::size_t header_size(std::istream& in, const char* what) {
    const std::string tok = header_token(in);
    try {
        std::size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size() || v <= 0 || v > (1 << 16)) {
            throw DataError("");
        }
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw DataError(std::string("image header: bad ") + what + " '" + tok + "'");
    }
}

template <typename Image>
void write_file(const std::filesystem::path& path, const Image& img, void (*fn)(std::ostream&, const Image&)) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    fn(out, img);
}

std::ifstream open_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return in;
}

} // namespace

void write_ppm(std::ostream& out, const ImageRGB8& img) {
    out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

void write_ppm(const std::filesystem::path& path, const ImageRGB8& img) { write_file(path, img, &write_ppm); }

std::string encode_ppm(const ImageRGB8& img) {
    std::ostringstream out(std::ios::binary);
    write_ppm(out, img);
    return out.str();
}

ImageRGB8 read_ppm(std::istream& in) {
    if (header_token(in) != "P6") {
        throw DataError("not a binary PPM (P6) image");
    }
    const std::size_t w = header_size(in, "width");
    const std::size_t h = header_size(in, "height");
    if (header_size(in, "maxval") != 255) {
        throw DataError("only 8-bit PPM images are supported");
    }
    ImageRGB8 img(w, h);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
        throw DataError("truncated PPM pixel data");
    }
    return img;
}

ImageRGB8 read_ppm(const std::filesystem::path& path) {
    auto in = open_binary(path);
    return read_ppm(in);
}

void write_pfm(std::ostream& out, const ImageF& img) {
    out << "PF\n" << img.width << ' ' << img.height << "\n-1.0\n";
    for (std::size_t y = img.height; y-- > 0;) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const float* p = img.at(x, y);
            for (int c = 0; c < 3; ++c) {
                std::uint32_t bits = std::bit_cast<std::uint32_t>(p[c]);
                if constexpr (std::endian::native == std::endian::big) {
                    bits = __builtin_bswap32(bits);
                }
                out.write(reinterpret_cast<const char*>(&bits), 4);
            }
        }
    }
}

void write_pfm(const std::filesystem::path& path, const ImageF& img) { write_file(path, img, &write_pfm); }

ImageF read_pfm(std::istream& in) {
    const std::string magic = header_token(in);
    if (magic != "PF" && magic != "Pf") {
        throw DataError("not a PFM image");
    }
    const std::size_t channels = magic == "PF" ? 3 : 1;
    const std::size_t w = header_size(in, "width");
    const std::size_t h = header_size(in, "height");
    const std::string scale_tok = header_token(in);
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception&) {
        throw DataError("PFM header: bad scale '" + scale_tok + "'");
    }
    if (scale == 0.0) {
        throw DataError("PFM header: zero scale");
    }
    const bool little = scale < 0.0;
    const bool swap = little != (std::endian::native == std::endian::little);
    ImageF img(w, h);
    std::vector<std::uint32_t> row(w * channels);
    for (std::size_t y = h; y-- > 0;) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
        if (in.gcount() != static_cast<std::streamsize>(row.size() * 4)) {
            throw DataError("truncated PFM pixel data");
        }
        for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t c = 0; c < 3; ++c) {
                std::uint32_t bits = row[x * channels + (channels == 3 ? c : 0)];
                if (swap) {
                    bits = __builtin_bswap32(bits);
                }
                img.at(x, y)[c] = std::bit_cast<float>(bits);
            }
        }
    }
    return img;
}

ImageF read_pfm(const std::filesystem::path& path) {
    auto in = open_binary(path);
    return read_pfm(in);
}

ImageF read_texture(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pfm" || ext == ".PFM") {
        return read_pfm(path);
    }
    if (ext == ".ppm" || ext == ".PPM") {
        const ImageRGB8 src = read_ppm(path);
        ImageF img(src.width, src.height);
        for (std::size_t i = 0; i < src.pixels.size(); ++i) {
            img.pixels[i] = static_cast<float>(src.pixels[i]) / 255.0f;
        }
        return img;
    }
    throw DataError("unsupported texture format " + path.string() + " (use .pfm or .ppm)");
}

} // namespace fluoro
