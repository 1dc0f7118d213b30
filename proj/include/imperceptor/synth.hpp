#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "imperceptor/image.hpp"
#include "imperceptor/rng.hpp"

namespace imperceptor {

enum class Skin { light, dark };

inline std::string skin_to_string(Skin s) { return s == Skin::light ? "light" : "dark"; }

inline Skin skin_from_string(const std::string& s) {
    if (s == "light") return Skin::light;
    if (s == "dark") return Skin::dark;
    throw FormatError("unknown skin value: " + s);
}

// gender: 1 = short-hair analogue of the reference group, 0 = long-hair.
// age: 1 = old analogue (wrinkled forehead), 0 = young.
struct Attributes {
    int gender = 0;
    Skin skin = Skin::light;
    int age = 0;

    bool operator==(const Attributes&) const = default;
};

struct AttributeRequest {
    std::optional<int> gender;
    std::optional<Skin> skin;
    std::optional<int> age;
};

constexpr int kCanvas = 64;
constexpr double kLuminanceThreshold = 128.0;  // dark/light split on base skin RGB
constexpr double kHairGenderThreshold = 7.5;   // hair band height split
constexpr int kWrinkleAgeThreshold = 2;        // forehead line count split

// Procedurally drawn portrait parameters. Attributes are a pure function of
// these fields, never stored separately.
struct IdentitySpec {
    int identity_id = 0;
    double face_a = 20.0;        // ellipse semi-axis, columns
    double face_b = 25.0;        // ellipse semi-axis, rows
    double eye_spacing = 14.0;   // distance between eye centers
    double eye_row_offset = 7.0; // rows above face center
    double mouth_row_offset = 10.0;
    double mouth_width = 12.0;
    std::array<std::uint8_t, 3> skin_rgb = {210, 180, 150};
    double hair_height = 4.0;    // hair band rows from the ellipse top
    int wrinkle_count = 0;

    Attributes attributes() const {
        Attributes a;
        const double lum = 0.299 * skin_rgb[0] + 0.587 * skin_rgb[1] + 0.114 * skin_rgb[2];
        a.skin = lum < kLuminanceThreshold ? Skin::dark : Skin::light;
        a.gender = hair_height <= kHairGenderThreshold ? 1 : 0;
        a.age = wrinkle_count >= kWrinkleAgeThreshold ? 1 : 0;
        return a;
    }

    bool operator==(const IdentitySpec&) const = default;
};

// Deterministic in (master_seed, identity_id, request). Geometry, color and
// attribute coins come from independent derived streams and each parameter
// consumes a fixed number of draws, so two requests that differ only in skin
// produce identical geometry.
inline IdentitySpec gen_identity(std::uint64_t master_seed, int identity_id,
                                 const AttributeRequest& request = {}) {
    Rng geom(derive_seed(master_seed, 11, static_cast<std::uint64_t>(identity_id)));
    Rng color(derive_seed(master_seed, 22, static_cast<std::uint64_t>(identity_id)));
    Rng attr(derive_seed(master_seed, 33, static_cast<std::uint64_t>(identity_id)));

    const int gender = request.gender ? *request.gender : (attr.coin() ? 1 : 0);
    const Skin skin = request.skin ? *request.skin : (attr.coin() ? Skin::light : Skin::dark);
    const int age = request.age ? *request.age : (attr.coin() ? 1 : 0);

    IdentitySpec spec;
    spec.identity_id = identity_id;
    spec.face_a = geom.uniform(18.0, 26.0);
    spec.face_b = geom.uniform(24.0, 28.0);
    spec.eye_spacing = geom.uniform(10.0, 18.0);
    spec.eye_row_offset = geom.uniform(6.0, 9.0);
    spec.mouth_row_offset = geom.uniform(8.0, 12.0);
    spec.mouth_width = geom.uniform(8.0, 16.0);
    spec.hair_height = gender == 1 ? geom.uniform(2.0, 6.0) : geom.uniform(9.0, 12.0);
    spec.wrinkle_count = age == 1 ? geom.uniform_int(2, 3) : geom.uniform_int(0, 1);
    if (skin == Skin::light) {
        spec.skin_rgb = {static_cast<std::uint8_t>(color.uniform_int(205, 235)),
                         static_cast<std::uint8_t>(color.uniform_int(170, 200)),
                         static_cast<std::uint8_t>(color.uniform_int(140, 170))};
    } else {
        spec.skin_rgb = {static_cast<std::uint8_t>(color.uniform_int(80, 115)),
                         static_cast<std::uint8_t>(color.uniform_int(50, 80)),
                         static_cast<std::uint8_t>(color.uniform_int(30, 55))};
    }
    return spec;
}

// Pose/lighting jitter applied to the canonical portrait.
struct VariantParams {
    double dx = 0.0;         // columns, |dx| <= 4
    double dy = 0.0;         // rows, |dy| <= 4
    double rot_deg = 0.0;    // |rot| <= 10
    double brightness = 1.0; // in [0.8, 1.2]
};

inline VariantParams sample_variant(std::uint64_t variant_seed) {
    Rng rng(variant_seed);
    VariantParams p;
    p.dx = rng.uniform(-4.0, 4.0);
    p.dy = rng.uniform(-4.0, 4.0);
    p.rot_deg = rng.uniform(-10.0, 10.0);
    p.brightness = rng.uniform(0.8, 1.2);
    return p;
}

namespace detail {

constexpr std::array<std::uint8_t, 3> kBackground = {190, 195, 200};
constexpr std::array<std::uint8_t, 3> kHairColor = {45, 35, 30};
constexpr std::array<std::uint8_t, 3> kEyeColor = {30, 25, 25};
constexpr std::array<std::uint8_t, 3> kMouthColor = {130, 45, 45};

inline void put(Image& img, int row, int col, const std::array<std::uint8_t, 3>& rgb) {
    if (row < 0 || row >= img.height || col < 0 || col >= img.width) return;
    img.at(row, col, 0) = rgb[0];
    img.at(row, col, 1) = rgb[1];
    img.at(row, col, 2) = rgb[2];
}

// Integer-pixel canonical portrait; the face center pixel is exactly the base
// skin RGB by construction (no feature overlaps the center).
inline Image render_base(const IdentitySpec& spec) {
    const int cx = kCanvas / 2, cy = kCanvas / 2;
    Image img(kCanvas, kCanvas, 3);
    for (int r = 0; r < kCanvas; ++r) {
        for (int c = 0; c < kCanvas; ++c) {
            put(img, r, c, kBackground);
        }
    }
    auto inside_face = [&](int r, int c) {
        const double nx = (c - cx) / spec.face_a;
        const double ny = (r - cy) / spec.face_b;
        return nx * nx + ny * ny <= 1.0;
    };
    for (int r = 0; r < kCanvas; ++r) {
        for (int c = 0; c < kCanvas; ++c) {
            if (inside_face(r, c)) put(img, r, c, spec.skin_rgb);
        }
    }

    // Forehead wrinkles between hairline and the eye row; drawn before hair
    // so the band can never leak above the hairline.
    const int hairline = static_cast<int>(std::lround(cy - spec.face_b + spec.hair_height));
    const int eye_row = static_cast<int>(std::lround(cy - spec.eye_row_offset));
    if (spec.wrinkle_count > 0) {
        const std::array<std::uint8_t, 3> wrinkle = {
            static_cast<std::uint8_t>(spec.skin_rgb[0] * 0.72),
            static_cast<std::uint8_t>(spec.skin_rgb[1] * 0.72),
            static_cast<std::uint8_t>(spec.skin_rgb[2] * 0.72)};
        const int band_top = hairline + 1;
        const int band_bottom = eye_row - 3;
        for (int k = 0; k < spec.wrinkle_count; ++k) {
            const int r = band_top + (band_bottom - band_top) * (k + 1) / (spec.wrinkle_count + 1);
            if (r <= hairline || r >= eye_row) continue;
            const int half = static_cast<int>(spec.face_a * 0.45);
            for (int c = cx - half; c <= cx + half; ++c) {
                if (inside_face(r, c)) put(img, r, c, wrinkle);
            }
        }
    }

    // Hair band across the top of the ellipse.
    for (int r = 0; r < hairline && r < kCanvas; ++r) {
        for (int c = 0; c < kCanvas; ++c) {
            if (inside_face(r, c)) put(img, r, c, kHairColor);
        }
    }

    // Eyes: filled circles left/right of center, above it.
    const double eye_r = 2.2;
    for (int side = -1; side <= 1; side += 2) {
        const double ec = cx + side * spec.eye_spacing / 2.0;
        for (int r = eye_row - 3; r <= eye_row + 3; ++r) {
            for (int c = static_cast<int>(ec) - 3; c <= static_cast<int>(ec) + 3; ++c) {
                const double dr = r - eye_row, dc = c - ec;
                if (dr * dr + dc * dc <= eye_r * eye_r) put(img, r, c, kEyeColor);
            }
        }
    }

    // Mouth: two-row horizontal bar below center.
    const int mouth_row = static_cast<int>(std::lround(cy + spec.mouth_row_offset));
    const int mhalf = static_cast<int>(spec.mouth_width / 2.0);
    for (int r = mouth_row; r <= mouth_row + 1; ++r) {
        for (int c = cx - mhalf; c <= cx + mhalf; ++c) {
            if (inside_face(r, c)) put(img, r, c, kMouthColor);
        }
    }
    return img;
}

}  // namespace detail

// Nearest-neighbor inverse-mapped rotation/translation, then brightness and
// re-quantization; zero jitter reproduces the canonical portrait bit for bit.
inline Image render(const IdentitySpec& spec, const VariantParams& params) {
    const Image base = detail::render_base(spec);
    Image out(kCanvas, kCanvas, 3);
    const double theta = params.rot_deg * M_PI / 180.0;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cy = (kCanvas - 1) / 2.0, cx = (kCanvas - 1) / 2.0;
    for (int r = 0; r < kCanvas; ++r) {
        for (int c = 0; c < kCanvas; ++c) {
            const double ry = r - params.dy - cy;
            const double rx = c - params.dx - cx;
            const int sr = static_cast<int>(std::lround(ct * ry + st * rx + cy));
            const int sc = static_cast<int>(std::lround(-st * ry + ct * rx + cx));
            for (int ch = 0; ch < 3; ++ch) {
                const std::uint8_t v =
                    (sr >= 0 && sr < kCanvas && sc >= 0 && sc < kCanvas)
                        ? base.at(sr, sc, ch)
                        : detail::kBackground[static_cast<std::size_t>(ch)];
                const long scaled = std::lround(v * params.brightness);
                out.at(r, c, ch) = static_cast<std::uint8_t>(std::clamp(scaled, 0L, 255L));
            }
        }
    }
    return out;
}

inline Image render(const IdentitySpec& spec, std::uint64_t variant_seed) {
    return render(spec, sample_variant(variant_seed));
}

}  // namespace imperceptor
