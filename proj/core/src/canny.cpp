#include "rvote/canny.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rvote {

void CannyConfig::validate() const {
    if (!(gaussian_sigma > 0.0))
        throw std::invalid_argument("canny: gaussian_sigma must be > 0");
    if (!(low_ratio > 0.0 && low_ratio < high_ratio && high_ratio <= 1.0))
        throw std::invalid_argument("canny: need 0 < low_ratio < high_ratio <= 1");
}

std::size_t EdgeMap::edge_count() const {
    return static_cast<std::size_t>(std::count(edge.begin(), edge.end(), std::uint8_t{1}));
}

std::vector<double> grayscale(const RasterImage& img) {
    std::vector<double> plane(img.pixel_count());
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) plane[i] = luma(px[i]);
    return plane;
}

namespace {

inline int clamp_coord(int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); }

}  // namespace

std::vector<double> gaussian_blur(std::span<const double> plane, int w, int h, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : kernel) v /= sum;

    std::vector<double> tmp(plane.size());
    std::vector<double> out(plane.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       plane[static_cast<std::size_t>(y) * w + clamp_coord(x + i, w)];
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       tmp[static_cast<std::size_t>(clamp_coord(y + i, h)) * w + x];
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

EdgeMap canny(const RasterImage& img, const CannyConfig& cfg) {
    cfg.validate();
    if (img.empty()) throw std::invalid_argument("canny: empty image");

    const int w = img.width();
    const int h = img.height();
    const std::size_t n = img.pixel_count();

    const std::vector<double> blurred = gaussian_blur(grayscale(img), w, h, cfg.gaussian_sigma);

    auto plane_at = [&](const std::vector<double>& p, int x, int y) {
        return p[static_cast<std::size_t>(clamp_coord(y, h)) * w + clamp_coord(x, w)];
    };

    std::vector<double> gx(n), gy(n), mag(n);
    double max_mag = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double tl = plane_at(blurred, x - 1, y - 1), tc = plane_at(blurred, x, y - 1),
                         tr = plane_at(blurred, x + 1, y - 1), ml = plane_at(blurred, x - 1, y),
                         mr = plane_at(blurred, x + 1, y), bl = plane_at(blurred, x - 1, y + 1),
                         bc = plane_at(blurred, x, y + 1), br = plane_at(blurred, x + 1, y + 1);
            const double dx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            const double dy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gx[i] = dx;
            gy[i] = dy;
            mag[i] = std::hypot(dx, dy);
            max_mag = std::max(max_mag, mag[i]);
        }
    }

    EdgeMap map;
    map.width = w;
    map.height = h;
    map.edge.assign(n, 0);
    map.orientation.assign(n, 0.0);
    map.magnitude = mag;
    if (max_mag <= 0.0) return map;  // constant image

    // Non-maximum suppression. Sector tie-breaking keeps one pixel of an
    // equal-magnitude pair: strictly greater toward the negative side,
    // greater-or-equal toward the positive side.
    constexpr double kTan22 = 0.41421356237309503;  // tan(22.5 deg)
    constexpr double kTan67 = 2.41421356237309503;  // tan(67.5 deg)
    auto mag_at = [&](int x, int y) -> double {
        if (x < 0 || x >= w || y < 0 || y >= h) return 0.0;
        return mag[static_cast<std::size_t>(y) * w + x];
    };
    std::vector<std::uint8_t> keep(n, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double m = mag[i];
            if (m <= 0.0) continue;
            const double ax = std::fabs(gx[i]);
            const double ay = std::fabs(gy[i]);
            double prev, next;
            if (ay <= ax * kTan22) {  // gradient near horizontal
                prev = mag_at(x - 1, y);
                next = mag_at(x + 1, y);
            } else if (ay >= ax * kTan67) {  // near vertical
                prev = mag_at(x, y - 1);
                next = mag_at(x, y + 1);
            } else if ((gx[i] > 0) == (gy[i] > 0)) {  // diagonal, same signs
                prev = mag_at(x - 1, y - 1);
                next = mag_at(x + 1, y + 1);
            } else {
                prev = mag_at(x + 1, y - 1);
                next = mag_at(x - 1, y + 1);
            }
            if (m > prev && m >= next) keep[i] = 1;
        }
    }

    const double high = cfg.high_ratio * max_mag;
    const double low = cfg.low_ratio * max_mag;

    // Hysteresis: seed from strong survivors, grow through weak ones,
    // 8-connected.
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i] && mag[i] >= high && !map.edge[i]) {
            map.edge[i] = 1;
            stack.push_back(i);
            while (!stack.empty()) {
                const std::size_t j = stack.back();
                stack.pop_back();
                const int jx = static_cast<int>(j % static_cast<std::size_t>(w));
                const int jy = static_cast<int>(j / static_cast<std::size_t>(w));
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = jx + dx;
                        const int ny = jy + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        const std::size_t k = static_cast<std::size_t>(ny) * w + nx;
                        if (keep[k] && !map.edge[k] && mag[k] >= low) {
                            map.edge[k] = 1;
                            stack.push_back(k);
                        }
                    }
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!map.edge[i]) continue;
        double theta = std::atan2(gy[i], gx[i]);
        if (theta < 0.0) theta += std::numbers::pi;
        if (theta >= std::numbers::pi) theta -= std::numbers::pi;
        map.orientation[i] = theta;
    }
    return map;
}

}  // namespace rvote
