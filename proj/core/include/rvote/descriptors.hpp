#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rvote/canny.hpp"
#include "rvote/image.hpp"

namespace rvote {

enum class DescriptorId { AutoColor, Edge, Fuzzy, Phog };

inline constexpr DescriptorId kAllDescriptors[] = {
    DescriptorId::AutoColor, DescriptorId::Edge, DescriptorId::Fuzzy, DescriptorId::Phog};

const char* descriptor_name(DescriptorId);  // "AutoColor", "Edge", "Fuzzy", "PHOG"
std::optional<DescriptorId> parse_descriptor(std::string_view);

struct AutoColorConfig {
    int levels_per_channel = 4;
    std::vector<int> distances{1, 3, 5, 7};  // Chebyshev ring radii
};

struct EdgeHistConfig {
    int grid = 4;  // grid x grid sub-images
    int orientation_bins = 8;
};

struct FuzzyConfig {
    int bins_per_axis = 4;
};

struct PhogConfig {
    int orientation_bins = 8;
    int pyramid_levels = 2;  // levels 0..pyramid_levels inclusive
};

struct DescriptorConfig {
    AutoColorConfig autocolor;
    EdgeHistConfig edge;
    FuzzyConfig fuzzy;
    PhogConfig phog;
    CannyConfig canny;

    void validate() const;
    std::size_t dimension(DescriptorId) const;
    // Key component for the feature cache; covers every parameter the
    // descriptor's output depends on (including Canny settings where used).
    std::uint64_t config_hash(DescriptorId) const;
};

struct FeatureVector {
    DescriptorId descriptor_id = DescriptorId::AutoColor;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

// Color autocorrelogram: P(neighbor at Chebyshev distance d has color c |
// center has color c), over a uniform levels^3 RGB quantization.
// Out-of-image neighbors are excluded from numerator and denominator;
// colors with no support emit 0. Layout: color-major, distances inner.
FeatureVector extract_autocolor(const RasterImage&, const DescriptorConfig&);

// Canny edge orientations histogrammed per grid cell over [0, pi),
// concatenated row-major and L1-normalized (all-zero when no edges).
FeatureVector extract_edgehist(const RasterImage&, const DescriptorConfig&);

// Fuzzy opponent-color histogram: triangular memberships per opponent axis,
// joint histogram as the outer product, L1-normalized.
FeatureVector extract_fuzzyopp(const RasterImage&, const DescriptorConfig&);

// Pyramid histogram of gradient orientations at Canny edge pixels, weighted
// by gradient magnitude; levels 0..pyramid_levels concatenated and
// L1-normalized over the full vector.
FeatureVector extract_phog(const RasterImage&, const DescriptorConfig&);

FeatureVector extract(DescriptorId, const RasterImage&, const DescriptorConfig&);

// Process-wide count of extract() invocations; lets cache tests assert that
// a warm cache performs zero descriptor computations.
std::uint64_t extraction_count();

}  // namespace rvote
