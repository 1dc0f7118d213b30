#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "imperceptor/errors.hpp"
#include "imperceptor/tensor.hpp"

namespace imperceptor {

// 8-bit image, rows top to bottom, channels interleaved (PPM byte order).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          pixels(static_cast<std::size_t>(w) * h * c, fill) {}

    std::size_t size() const { return pixels.size(); }

    std::uint8_t& at(int row, int col, int ch) {
        return pixels[(static_cast<std::size_t>(row) * width + col) * channels + ch];
    }
    std::uint8_t at(int row, int col, int ch) const {
        return pixels[(static_cast<std::size_t>(row) * width + col) * channels + ch];
    }

    bool same_dims(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Raw pixel values as doubles, shape {H, W, C}. Normalization to [0,1]
// happens inside the model boundary, not here.
inline Tensor image_to_tensor(const Image& img) {
    Tensor t({img.height, img.width, img.channels});
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        t.data[i] = static_cast<double>(img.pixels[i]);
    }
    return t;
}

// Binary PPM (P6, maxval 255). Bit-exact round trip.
inline void write_ppm(const Image& img, const std::filesystem::path& path) {
    if (img.channels != 3) {
        throw ConfigError("write_ppm: P6 requires 3 channels, image has " +
                          std::to_string(img.channels));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw IoError("short write: " + path.string());
}

namespace detail {

// Skips whitespace and '#' comment lines between header tokens.
inline int next_pnm_int(std::istream& in, const std::string& path) {
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF || !std::isdigit(ch)) {
        throw FormatError("malformed PPM header in " + path);
    }
    long value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        if (value > 1 << 20) throw FormatError("absurd PPM header value in " + path);
        ch = in.get();
    }
    if (ch != EOF) in.unget();
    return static_cast<int>(value);
}

}  // namespace detail

inline Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '6') {
        throw FormatError("not a P6 PPM file: " + path.string());
    }
    const int w = detail::next_pnm_int(in, path.string());
    const int h = detail::next_pnm_int(in, path.string());
    const int maxval = detail::next_pnm_int(in, path.string());
    if (maxval != 255) {
        throw FormatError("unsupported PPM maxval " + std::to_string(maxval) + " in " +
                          path.string());
    }
    // Single whitespace byte separates the header from pixel data.
    in.get();
    if (!in) throw FormatError("truncated PPM header in " + path.string());
    Image img(w, h, 3);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
        throw FormatError("truncated PPM pixel data in " + path.string());
    }
    return img;
}

}  // namespace imperceptor
