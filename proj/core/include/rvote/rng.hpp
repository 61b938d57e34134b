#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace rvote {

// Project-wide seedable generator. splitmix64 is pinned (rather than
// std::mt19937 + distributions) so that every drawn number is identical
// across platforms and standard-library versions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). Modulo bias is below 2^-53 for any n we draw.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller. Draws two uniforms per call; no cached spare.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Derives independent sub-stream seeds (per tree, per fold, per grid cell)
// from a master seed and a stream tag.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t tag) {
    SplitMix64 g(master ^ (tag * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
    return g.next();
}

}  // namespace rvote
