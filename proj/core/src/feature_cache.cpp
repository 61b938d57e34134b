#include "rvote/feature_cache.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rvote/errors.hpp"
#include "rvote/hash.hpp"

namespace rvote {

FeatureCache::FeatureCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::string FeatureCache::format_row(const std::vector<double>& values) {
    std::string line;
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", values[i]);
        if (i) line += ',';
        line += buf;
    }
    return line;
}

std::vector<double> FeatureCache::parse_row(const std::string& line) {
    std::vector<double> values;
    const char* p = line.c_str();
    while (*p) {
        char* end = nullptr;
        values.push_back(std::strtod(p, &end));
        if (end == p) throw IoError("feature cache: malformed row");
        p = *end == ',' ? end + 1 : end;
    }
    return values;
}

std::vector<double> FeatureCache::get_or_compute(
    DescriptorId id, const DescriptorConfig& cfg, const RasterImage& img,
    const std::function<std::vector<double>()>& compute) {
    const std::string key_descriptor = descriptor_name(id);
    const std::string key_config = hex16(cfg.config_hash(id));
    const std::string key_image = hex16(image_content_hash(img));
    const std::string key = key_descriptor + "/" + key_config + "/" + key_image;

    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = memory_.find(key);
        if (it != memory_.end()) return it->second;
    }

    std::filesystem::path file;
    if (!dir_.empty()) {
        file = dir_ / key_descriptor / key_config / (key_image + ".csvrow");
        std::ifstream in(file);
        if (in) {
            std::string line;
            std::getline(in, line);
            if (!line.empty()) {
                auto values = parse_row(line);
                std::lock_guard<std::mutex> lock(mutex_);
                memory_.emplace(key, values);
                return values;
            }
        }
    }

    // Canonicalize through the on-disk text form so the first computation
    // returns the same numbers as every later cache hit.
    auto values = parse_row(format_row(compute()));

    if (!dir_.empty()) {
        static std::atomic<std::uint64_t> tmp_counter{0};
        std::filesystem::create_directories(file.parent_path());
        const std::filesystem::path tmp =
            file.parent_path() / (key_image + "." + std::to_string(::getpid()) + "." +
                                  std::to_string(tmp_counter.fetch_add(1)) + ".tmp");
        {
            std::ofstream out(tmp, std::ios::trunc);
            out << format_row(values) << "\n";
            if (!out) throw IoError("feature cache: write failed: " + tmp.string());
        }
        std::filesystem::rename(tmp, file);  // atomic replace
    }
    std::lock_guard<std::mutex> lock(mutex_);
    memory_.emplace(key, values);
    return values;
}

}  // namespace rvote
