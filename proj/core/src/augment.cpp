#include "rvote/augment.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace rvote {

namespace {

inline long floor_div(long a, long b) {
    long q = a / b;
    long r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

// Nearest integer to v/2 (v in doubled coordinates), rounding halves up.
inline long half_round(long v) { return floor_div(v + 1, 2); }

// Inverse grid permutation for quarter turns. Doubled-integer coordinates
// keep the mapping exact when source and destination parities match (always
// true for square images); mixed parity rounds halves up, same as the
// floating-point path.
RasterImage rotate_quarter(const RasterImage& img, int quarter, FillColor fill) {
    const int w = img.width();
    const int h = img.height();
    if (quarter == 0) return img;
    if (quarter == 2) {
        RasterImage out(w, h, fill.rgb);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.at(x, y) = img.at(w - 1 - x, h - 1 - y);
        return out;
    }
    RasterImage out(w, h, fill.rgb);
    const long sx = w - 1;  // doubled center coordinates: 2*cx, 2*cy
    const long sy = h - 1;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            long xs2, ys2;
            if (quarter == 1) {  // 90 deg anticlockwise
                xs2 = sx + sy - 2L * y;
                ys2 = 2L * x - sx + sy;
            } else {  // 270 deg anticlockwise
                xs2 = sx - sy + 2L * y;
                ys2 = sx + sy - 2L * x;
            }
            const long xi = half_round(xs2);
            const long yi = half_round(ys2);
            if (xi >= 0 && xi < w && yi >= 0 && yi < h)
                out.at(x, y) = img.at(static_cast<int>(xi), static_cast<int>(yi));
        }
    }
    return out;
}

}  // namespace

RasterImage rotate(const RasterImage& img, double angle_degrees, FillColor fill) {
    if (!std::isfinite(angle_degrees))
        throw std::invalid_argument("rotate: angle must be finite");
    if (img.empty()) throw std::invalid_argument("rotate: empty image");

    if (std::fmod(angle_degrees, 90.0) == 0.0) {
        const long quarters = std::lround(angle_degrees / 90.0);
        return rotate_quarter(img, static_cast<int>(((quarters % 4) + 4) % 4), fill);
    }

    const int w = img.width();
    const int h = img.height();
    const double cx = (w - 1) / 2.0;
    const double cy = (h - 1) / 2.0;
    const double rad = angle_degrees * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);

    RasterImage out(w, h, fill.rgb);
    for (int y = 0; y < h; ++y) {
        const double dy = y - cy;
        for (int x = 0; x < w; ++x) {
            const double dx = x - cx;
            // Inverse of the anticlockwise (screen y-down) rotation.
            const double xs = c * dx - s * dy + cx;
            const double ys = s * dx + c * dy + cy;
            const long xi = static_cast<long>(std::floor(xs + 0.5));
            const long yi = static_cast<long>(std::floor(ys + 0.5));
            if (xi >= 0 && xi < w && yi >= 0 && yi < h)
                out.at(x, y) = img.at(static_cast<int>(xi), static_cast<int>(yi));
        }
    }
    return out;
}

RasterImage flip_horizontal(const RasterImage& img) {
    if (img.empty()) throw std::invalid_argument("flip_horizontal: empty image");
    const int w = img.width();
    const int h = img.height();
    RasterImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = img.at(w - 1 - x, y);
    return out;
}

RasterImage flip_vertical(const RasterImage& img) {
    if (img.empty()) throw std::invalid_argument("flip_vertical: empty image");
    const int w = img.width();
    const int h = img.height();
    RasterImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = img.at(x, h - 1 - y);
    return out;
}

FillColor modal_border_color(const RasterImage& img) {
    if (img.empty()) throw std::invalid_argument("modal_border_color: empty image");
    std::map<Rgb, int> counts;
    const int w = img.width();
    const int h = img.height();
    for (int x = 0; x < w; ++x) {
        ++counts[img.at(x, 0)];
        if (h > 1) ++counts[img.at(x, h - 1)];
    }
    for (int y = 1; y + 1 < h; ++y) {
        ++counts[img.at(0, y)];
        if (w > 1) ++counts[img.at(w - 1, y)];
    }
    // Ties resolve to the lexicographically smallest color (map order).
    Rgb best{0, 0, 0};
    int best_count = -1;
    for (const auto& [color, count] : counts) {
        if (count > best_count) {
            best = color;
            best_count = count;
        }
    }
    return FillColor{best};
}

AugmentedGroup build_group(const RasterImage& img, std::string source_id, int label,
                           const AugmentConfig& cfg) {
    if (img.empty()) throw std::invalid_argument("build_group: empty image");
    const FillColor fill = cfg.fill_from_border ? modal_border_color(img) : cfg.fill;
    auto flip = cfg.flip == FlipAxis::Horizontal ? flip_horizontal : flip_vertical;

    AugmentedGroup group;
    group.source_id = std::move(source_id);
    group.label = label;
    group.variants.reserve(AugmentedGroup::kVariants);
    group.variants.push_back(img);
    group.variants.push_back(rotate(img, 30.0, fill));
    group.variants.push_back(rotate(img, 60.0, fill));
    group.variants.push_back(rotate(img, 90.0, fill));
    for (int i = 0; i < 4; ++i) group.variants.push_back(flip(group.variants[i]));
    return group;
}

}  // namespace rvote
