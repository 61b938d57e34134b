#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "rvote/descriptors.hpp"
#include "rvote/image.hpp"

namespace rvote {

// Feature store keyed by (descriptor, config hash, image content hash).
// Disk layout: <dir>/<descriptor>/<confighash>/<imagehash>.csvrow, one
// comma-separated line of values at 9 significant digits. Values are
// canonicalized to that precision on first computation too, so cached and
// fresh paths yield identical numbers. Thread-safe; disk writes go through
// a temp file + atomic rename.
class FeatureCache {
public:
    FeatureCache() = default;  // memory-only
    explicit FeatureCache(std::filesystem::path dir);

    std::vector<double> get_or_compute(DescriptorId, const DescriptorConfig&,
                                       const RasterImage&,
                                       const std::function<std::vector<double>()>& compute);

    const std::filesystem::path& dir() const { return dir_; }

    static std::string format_row(const std::vector<double>& values);
    static std::vector<double> parse_row(const std::string& line);

private:
    std::filesystem::path dir_;  // empty: memory-only
    std::mutex mutex_;
    std::unordered_map<std::string, std::vector<double>> memory_;
};

}  // namespace rvote
