#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rvote/image.hpp"

namespace rvote {

struct CannyConfig {
    double gaussian_sigma = 1.4;
    // Hysteresis thresholds as ratios of the maximum gradient magnitude.
    double low_ratio = 0.1;
    double high_ratio = 0.3;

    void validate() const;
};

struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> edge;    // 0/1 per pixel
    std::vector<double> orientation;   // gradient angle in [0, pi); valid where edge
    std::vector<double> magnitude;     // Sobel magnitude, all pixels

    bool is_edge(int x, int y) const {
        return edge[static_cast<std::size_t>(y) * width + x] != 0;
    }
    double orientation_at(int x, int y) const {
        return orientation[static_cast<std::size_t>(y) * width + x];
    }
    double magnitude_at(int x, int y) const {
        return magnitude[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t edge_count() const;
};

// Luma plane (0.299 R + 0.587 G + 0.114 B), row-major doubles.
std::vector<double> grayscale(const RasterImage&);

// Separable Gaussian, kernel radius ceil(3*sigma), replicated borders.
std::vector<double> gaussian_blur(std::span<const double> plane, int w, int h, double sigma);

// Pipeline: grayscale -> Gaussian blur -> Sobel -> non-maximum suppression
// -> hysteresis at low_ratio*M / high_ratio*M where M is the maximum
// gradient magnitude. A constant image yields an empty edge set.
EdgeMap canny(const RasterImage&, const CannyConfig& = {});

}  // namespace rvote
