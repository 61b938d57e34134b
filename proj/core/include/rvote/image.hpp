#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rvote {

using Rgb = std::array<std::uint8_t, 3>;

struct FillColor {
    Rgb rgb{0, 0, 0};
};

// 8-bit RGB raster, row-major. Grayscale sources are replicated across the
// three channels at decode time, so pixel data is always width*height RGB
// triples. Immutable in practice: transforms return new images.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, Rgb fill = {0, 0, 0});

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }
    std::size_t pixel_count() const noexcept { return pixels_.size(); }

    Rgb& at(int x, int y) {
        return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
    }
    const Rgb& at(int x, int y) const {
        return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
    }

    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    std::span<Rgb> pixels() noexcept { return pixels_; }

    bool operator==(const RasterImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

// Fixed luma weights, pinned for cross-platform determinism.
inline double luma(const Rgb& p) {
    return 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
}

std::uint64_t image_content_hash(const RasterImage&);

// Binary PPM (P6, maxval 255), bit-exact round trip.
RasterImage read_ppm(const std::filesystem::path&);
void write_ppm(const RasterImage&, const std::filesystem::path&);

// Dataset boundary: PPM, PNG and JPEG, dispatched on file magic.
RasterImage decode_image(const std::filesystem::path&);

}  // namespace rvote
