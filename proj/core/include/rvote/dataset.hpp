#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvote/augment.hpp"
#include "rvote/classifier.hpp"
#include "rvote/descriptors.hpp"
#include "rvote/image.hpp"

namespace rvote {

// Directory-per-class corpus. Classes sort by name and paths sort
// lexicographically, so label indices are stable across loads.
struct ImageCorpus {
    struct ClassEntry {
        std::string name;
        std::vector<std::filesystem::path> images;
    };

    std::filesystem::path root;
    std::vector<ClassEntry> classes;

    std::size_t min_class_size() const;
    std::vector<std::string> class_names() const;
};

// Verifies decodability of every image; undecodable files are skipped with a
// warning. Throws CorpusError when fewer than two classes remain or a class
// loses all its images.
ImageCorpus load_corpus(const std::filesystem::path& root,
                        const std::function<void(const std::string&)>& warn = {});

struct SamplingPlan {
    std::size_t n_min = 0;
    std::vector<double> fractions;
    std::vector<std::size_t> sizes;  // ceil(fraction * n_min), floor 1
    std::uint64_t seed = 0;
};

inline const std::vector<double> kDefaultFractions{1.0, 0.8, 0.5, 0.3};

// ceil(fraction * n_min) with a tiny slack so binary fractions like 0.8
// reproduce the intended integer exactly.
std::size_t scaled_sample_size(double fraction, std::size_t n_min);

SamplingPlan plan_sampling(const ImageCorpus&, std::span<const double> fractions,
                           std::uint64_t seed);

struct Sample {
    std::filesystem::path path;
    int label = -1;
};

// Exactly `size` samples per class, without replacement via a per-class
// seeded shuffle; emitted class-major.
std::vector<Sample> draw_balanced(const ImageCorpus&, std::size_t size, std::uint64_t seed);

struct EvaluationProtocol {
    enum class Mode { Paper, Holdout };

    Mode mode = Mode::Holdout;
    double test_fraction = 0.3;  // holdout only
    int cv_folds = 10;           // paper-mode baseline
    AugmentConfig augment;

    void validate() const;
};

const char* protocol_name(EvaluationProtocol::Mode);
std::optional<EvaluationProtocol::Mode> parse_protocol(std::string_view);

// All 8 variant feature vectors of one original sample.
struct GroupFeatures {
    std::string source_id;
    int label = -1;
    std::vector<std::vector<double>> variants;
};

struct Materialized {
    LabeledDataset train;              // original-image features only
    std::vector<GroupFeatures> groups; // evaluation material (x8 variants)
};

class FeatureCache;

// Paper mode: train on every original, groups from the same originals.
// Holdout mode: per-class split of the drawn order; train side originals
// only, groups only from the held-out side.
Materialized materialize(std::span<const Sample> samples,
                         const std::vector<std::string>& class_names,
                         const EvaluationProtocol&, DescriptorId, const DescriptorConfig&,
                         FeatureCache* cache = nullptr, int jobs = 1);

}  // namespace rvote
