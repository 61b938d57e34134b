#pragma once

#include <string>
#include <vector>

#include "rvote/image.hpp"

namespace rvote {

enum class FlipAxis { Horizontal, Vertical };

// Ordered 8-image set derived from one original sample. The variant order
// is fixed: original, rot30, rot60, rot90, then the flip of each in the
// same order. All variants keep the original dimensions.
struct AugmentedGroup {
    static constexpr int kVariants = 8;

    std::string source_id;
    int label = -1;
    std::vector<RasterImage> variants;
};

struct AugmentConfig {
    FillColor fill;
    FlipAxis flip = FlipAxis::Horizontal;
    // When set, the fill color is estimated per image as the modal border
    // pixel color instead of cfg.fill.
    bool fill_from_border = false;
};

// Anticlockwise rotation about the image center ((w-1)/2, (h-1)/2), inverse
// mapped with nearest-neighbor sampling. Destinations whose source falls
// outside the grid receive `fill`. Exact multiples of 90 degrees take an
// integer grid-permutation path with no floating-point sampling.
RasterImage rotate(const RasterImage&, double angle_degrees, FillColor fill);

RasterImage flip_horizontal(const RasterImage&);
RasterImage flip_vertical(const RasterImage&);

FillColor modal_border_color(const RasterImage&);

AugmentedGroup build_group(const RasterImage&, std::string source_id, int label,
                           const AugmentConfig& = {});

}  // namespace rvote
