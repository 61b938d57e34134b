#include "rvote/descriptors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rvote/hash.hpp"

namespace rvote {

namespace {

std::atomic<std::uint64_t> g_extractions{0};

void l1_normalize(std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (sum > 0.0)
        for (double& x : v) x /= sum;
}

inline int orientation_bin(double theta, int bins) {
    int b = static_cast<int>(theta / std::numbers::pi * bins);
    return b >= bins ? bins - 1 : b;  // theta < pi, guard the floating edge
}

}  // namespace

const char* descriptor_name(DescriptorId id) {
    switch (id) {
        case DescriptorId::AutoColor: return "AutoColor";
        case DescriptorId::Edge: return "Edge";
        case DescriptorId::Fuzzy: return "Fuzzy";
        case DescriptorId::Phog: return "PHOG";
    }
    return "?";
}

std::optional<DescriptorId> parse_descriptor(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "autocolor") return DescriptorId::AutoColor;
    if (lower == "edge") return DescriptorId::Edge;
    if (lower == "fuzzy") return DescriptorId::Fuzzy;
    if (lower == "phog") return DescriptorId::Phog;
    return std::nullopt;
}

void DescriptorConfig::validate() const {
    if (autocolor.levels_per_channel < 1)
        throw std::invalid_argument("autocolor: levels_per_channel must be >= 1");
    if (autocolor.distances.empty())
        throw std::invalid_argument("autocolor: at least one distance required");
    for (int d : autocolor.distances)
        if (d < 1) throw std::invalid_argument("autocolor: distances must be >= 1");
    if (edge.grid < 1 || edge.orientation_bins < 1)
        throw std::invalid_argument("edge: grid and orientation_bins must be >= 1");
    if (fuzzy.bins_per_axis < 1)
        throw std::invalid_argument("fuzzy: bins_per_axis must be >= 1");
    if (phog.orientation_bins < 1 || phog.pyramid_levels < 0)
        throw std::invalid_argument("phog: bad bins or pyramid_levels");
    canny.validate();
}

std::size_t DescriptorConfig::dimension(DescriptorId id) const {
    switch (id) {
        case DescriptorId::AutoColor: {
            const std::size_t colors = static_cast<std::size_t>(autocolor.levels_per_channel) *
                                       autocolor.levels_per_channel * autocolor.levels_per_channel;
            return colors * autocolor.distances.size();
        }
        case DescriptorId::Edge:
            return static_cast<std::size_t>(edge.grid) * edge.grid * edge.orientation_bins;
        case DescriptorId::Fuzzy: {
            const std::size_t b = static_cast<std::size_t>(fuzzy.bins_per_axis);
            return b * b * b;
        }
        case DescriptorId::Phog: {
            std::size_t cells = 0;
            for (int l = 0; l <= phog.pyramid_levels; ++l)
                cells += static_cast<std::size_t>(1) << (2 * l);
            return cells * phog.orientation_bins;
        }
    }
    return 0;
}

std::uint64_t DescriptorConfig::config_hash(DescriptorId id) const {
    Fnv1a64 h;
    h.update(descriptor_name(id));
    switch (id) {
        case DescriptorId::AutoColor:
            h.update_value(autocolor.levels_per_channel);
            for (int d : autocolor.distances) h.update_value(d);
            break;
        case DescriptorId::Edge:
            h.update_value(edge.grid);
            h.update_value(edge.orientation_bins);
            h.update_value(canny.gaussian_sigma);
            h.update_value(canny.low_ratio);
            h.update_value(canny.high_ratio);
            break;
        case DescriptorId::Fuzzy:
            h.update_value(fuzzy.bins_per_axis);
            break;
        case DescriptorId::Phog:
            h.update_value(phog.orientation_bins);
            h.update_value(phog.pyramid_levels);
            h.update_value(canny.gaussian_sigma);
            h.update_value(canny.low_ratio);
            h.update_value(canny.high_ratio);
            break;
    }
    return h.value();
}

FeatureVector extract_autocolor(const RasterImage& img, const DescriptorConfig& cfg) {
    cfg.validate();
    if (img.empty()) throw std::invalid_argument("extract_autocolor: empty image");

    const int levels = cfg.autocolor.levels_per_channel;
    const int w = img.width();
    const int h = img.height();
    const std::size_t colors =
        static_cast<std::size_t>(levels) * levels * levels;
    const auto& distances = cfg.autocolor.distances;

    auto quantize = [levels](const Rgb& p) -> std::size_t {
        const int qr = p[0] * levels / 256;
        const int qg = p[1] * levels / 256;
        const int qb = p[2] * levels / 256;
        return (static_cast<std::size_t>(qr) * levels + qg) * levels + qb;
    };

    std::vector<std::size_t> quant(img.pixel_count());
    for (std::size_t i = 0; i < quant.size(); ++i) quant[i] = quantize(img.pixels()[i]);

    // same[c][j] / total[c][j]: neighbors of color c at ring j that share c /
    // that are in-bounds at all.
    std::vector<std::uint64_t> same(colors * distances.size(), 0);
    std::vector<std::uint64_t> total(colors * distances.size(), 0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t c = quant[static_cast<std::size_t>(y) * w + x];
            for (std::size_t j = 0; j < distances.size(); ++j) {
                const int d = distances[j];
                const std::size_t slot = c * distances.size() + j;
                // Chebyshev ring: max(|dx|, |dy|) == d.
                for (int dx = -d; dx <= d; ++dx) {
                    for (int dy = -d; dy <= d; ++dy) {
                        if (std::max(std::abs(dx), std::abs(dy)) != d) continue;
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        ++total[slot];
                        if (quant[static_cast<std::size_t>(ny) * w + nx] == c) ++same[slot];
                    }
                }
            }
        }
    }

    FeatureVector fv;
    fv.descriptor_id = DescriptorId::AutoColor;
    fv.values.resize(colors * distances.size(), 0.0);
    for (std::size_t i = 0; i < fv.values.size(); ++i)
        if (total[i] > 0)
            fv.values[i] = static_cast<double>(same[i]) / static_cast<double>(total[i]);
    return fv;
}

FeatureVector extract_edgehist(const RasterImage& img, const DescriptorConfig& cfg) {
    cfg.validate();
    if (img.empty()) throw std::invalid_argument("extract_edgehist: empty image");

    const EdgeMap map = canny(img, cfg.canny);
    const int grid = cfg.edge.grid;
    const int bins = cfg.edge.orientation_bins;
    const int w = img.width();
    const int h = img.height();

    FeatureVector fv;
    fv.descriptor_id = DescriptorId::Edge;
    fv.values.assign(static_cast<std::size_t>(grid) * grid * bins, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!map.is_edge(x, y)) continue;
            const int cx = x * grid / w;
            const int cy = y * grid / h;
            const int bin = orientation_bin(map.orientation_at(x, y), bins);
            fv.values[(static_cast<std::size_t>(cy) * grid + cx) * bins + bin] += 1.0;
        }
    }
    l1_normalize(fv.values);
    return fv;
}

FeatureVector extract_fuzzyopp(const RasterImage& img, const DescriptorConfig& cfg) {
    cfg.validate();
    if (img.empty()) throw std::invalid_argument("extract_fuzzyopp: empty image");

    const int bins = cfg.fuzzy.bins_per_axis;
    const double sqrt2 = std::numbers::sqrt2;
    const double sqrt3 = std::numbers::sqrt3;
    const double sqrt6 = std::sqrt(6.0);

    // Analytic ranges of the opponent axes over the 8-bit RGB cube.
    const double o1_min = -255.0 / sqrt2, o1_max = 255.0 / sqrt2;
    const double o2_min = -510.0 / sqrt6, o2_max = 510.0 / sqrt6;
    const double o3_min = 0.0, o3_max = 765.0 / sqrt3;

    // Triangular memberships with centers uniform on [0,1]; partition of
    // unity, so each pixel contributes total mass 1.
    auto memberships = [bins](double u) {
        std::vector<double> m(static_cast<std::size_t>(bins), 0.0);
        if (bins == 1) {
            m[0] = 1.0;
            return m;
        }
        const double step = 1.0 / (bins - 1);
        u = std::clamp(u, 0.0, 1.0);
        for (int k = 0; k < bins; ++k) {
            const double d = std::fabs(u - k * step) / step;
            if (d < 1.0) m[static_cast<std::size_t>(k)] = 1.0 - d;
        }
        return m;
    };

    FeatureVector fv;
    fv.descriptor_id = DescriptorId::Fuzzy;
    fv.values.assign(static_cast<std::size_t>(bins) * bins * bins, 0.0);

    for (const Rgb& p : img.pixels()) {
        const double r = p[0], g = p[1], b = p[2];
        const double o1 = (r - g) / sqrt2;
        const double o2 = (r + g - 2.0 * b) / sqrt6;
        const double o3 = (r + g + b) / sqrt3;
        const auto m1 = memberships((o1 - o1_min) / (o1_max - o1_min));
        const auto m2 = memberships((o2 - o2_min) / (o2_max - o2_min));
        const auto m3 = memberships((o3 - o3_min) / (o3_max - o3_min));
        for (int i = 0; i < bins; ++i) {
            if (m1[i] == 0.0) continue;
            for (int j = 0; j < bins; ++j) {
                if (m2[j] == 0.0) continue;
                const double mij = m1[i] * m2[j];
                for (int k = 0; k < bins; ++k)
                    fv.values[(static_cast<std::size_t>(i) * bins + j) * bins + k] +=
                        mij * m3[k];
            }
        }
    }
    l1_normalize(fv.values);
    return fv;
}

FeatureVector extract_phog(const RasterImage& img, const DescriptorConfig& cfg) {
    cfg.validate();
    if (img.empty()) throw std::invalid_argument("extract_phog: empty image");

    const EdgeMap map = canny(img, cfg.canny);
    const int bins = cfg.phog.orientation_bins;
    const int levels = cfg.phog.pyramid_levels;
    const int w = img.width();
    const int h = img.height();

    FeatureVector fv;
    fv.descriptor_id = DescriptorId::Phog;
    fv.values.assign(cfg.dimension(DescriptorId::Phog), 0.0);

    std::size_t offset = 0;
    for (int l = 0; l <= levels; ++l) {
        const int cells = 1 << l;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!map.is_edge(x, y)) continue;
                const int cx = x * cells / w;
                const int cy = y * cells / h;
                const int bin = orientation_bin(map.orientation_at(x, y), bins);
                fv.values[offset + (static_cast<std::size_t>(cy) * cells + cx) * bins + bin] +=
                    map.magnitude_at(x, y);
            }
        }
        offset += static_cast<std::size_t>(cells) * cells * bins;
    }
    l1_normalize(fv.values);
    return fv;
}

FeatureVector extract(DescriptorId id, const RasterImage& img, const DescriptorConfig& cfg) {
    g_extractions.fetch_add(1, std::memory_order_relaxed);
    switch (id) {
        case DescriptorId::AutoColor: return extract_autocolor(img, cfg);
        case DescriptorId::Edge: return extract_edgehist(img, cfg);
        case DescriptorId::Fuzzy: return extract_fuzzyopp(img, cfg);
        case DescriptorId::Phog: return extract_phog(img, cfg);
    }
    throw std::invalid_argument("extract: unknown descriptor");
}

std::uint64_t extraction_count() { return g_extractions.load(std::memory_order_relaxed); }

}  // namespace rvote
