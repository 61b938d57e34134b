#include "rvote/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "rvote/errors.hpp"
#include "rvote/feature_cache.hpp"
#include "rvote/rng.hpp"

namespace rvote {

std::size_t ImageCorpus::min_class_size() const {
    std::size_t m = classes.empty() ? 0 : classes.front().images.size();
    for (const auto& entry : classes) m = std::min(m, entry.images.size());
    return m;
}

std::vector<std::string> ImageCorpus::class_names() const {
    std::vector<std::string> names;
    names.reserve(classes.size());
    for (const auto& entry : classes) names.push_back(entry.name);
    return names;
}

namespace {

bool has_image_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".ppm" || ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

ImageCorpus load_corpus(const std::filesystem::path& root,
                        const std::function<void(const std::string&)>& warn) {
    auto emit_warning = [&](const std::string& msg) {
        if (warn)
            warn(msg);
        else
            std::cerr << "warning: " << msg << "\n";
    };

    if (!std::filesystem::is_directory(root))
        throw CorpusError("corpus root is not a directory: " + root.string());

    ImageCorpus corpus;
    corpus.root = root;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        ImageCorpus::ClassEntry cls;
        cls.name = entry.path().filename().string();
        for (const auto& file : std::filesystem::directory_iterator(entry.path())) {
            if (!file.is_regular_file() || !has_image_extension(file.path())) continue;
            cls.images.push_back(file.path());
        }
        std::sort(cls.images.begin(), cls.images.end());

        std::vector<std::filesystem::path> decodable;
        for (const auto& path : cls.images) {
            try {
                decode_image(path);
                decodable.push_back(path);
            } catch (const std::exception& e) {
                emit_warning("skipping undecodable image " + path.string() + ": " + e.what());
            }
        }
        if (decodable.empty() && !cls.images.empty())
            throw CorpusError("class '" + cls.name + "' has no decodable images");
        cls.images = std::move(decodable);
        if (!cls.images.empty()) corpus.classes.push_back(std::move(cls));
    }

    std::sort(corpus.classes.begin(), corpus.classes.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    if (corpus.classes.size() < 2)
        throw CorpusError("corpus needs at least two classes with images: " + root.string());
    return corpus;
}

std::size_t scaled_sample_size(double fraction, std::size_t n_min) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("sampling fraction must be in (0, 1]");
    const double raw = fraction * static_cast<double>(n_min);
    const auto size = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::max<std::size_t>(1, size);
}

SamplingPlan plan_sampling(const ImageCorpus& corpus, std::span<const double> fractions,
                           std::uint64_t seed) {
    if (fractions.empty()) throw std::invalid_argument("plan_sampling: no fractions");
    SamplingPlan plan;
    plan.n_min = corpus.min_class_size();
    plan.fractions.assign(fractions.begin(), fractions.end());
    plan.seed = seed;
    plan.sizes.reserve(fractions.size());
    for (double f : fractions) plan.sizes.push_back(scaled_sample_size(f, plan.n_min));
    return plan;
}

std::vector<Sample> draw_balanced(const ImageCorpus& corpus, std::size_t size,
                                  std::uint64_t seed) {
    if (size == 0) throw std::invalid_argument("draw_balanced: size must be >= 1");
    for (const auto& cls : corpus.classes)
        if (cls.images.size() < size)
            throw std::invalid_argument("draw_balanced: class '" + cls.name + "' has only " +
                                        std::to_string(cls.images.size()) + " samples");

    std::vector<Sample> samples;
    samples.reserve(size * corpus.classes.size());
    for (std::size_t c = 0; c < corpus.classes.size(); ++c) {
        std::vector<std::size_t> idx(corpus.classes[c].images.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        SplitMix64 rng(mix_seed(seed, 0xD4A0ULL + c));
        rng.shuffle(idx);
        for (std::size_t i = 0; i < size; ++i)
            samples.push_back({corpus.classes[c].images[idx[i]], static_cast<int>(c)});
    }
    return samples;
}

void EvaluationProtocol::validate() const {
    if (mode == Mode::Holdout && !(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("protocol: test_fraction must be in (0, 1)");
    if (cv_folds < 2) throw std::invalid_argument("protocol: cv_folds must be >= 2");
}

const char* protocol_name(EvaluationProtocol::Mode mode) {
    return mode == EvaluationProtocol::Mode::Paper ? "paper" : "holdout";
}

std::optional<EvaluationProtocol::Mode> parse_protocol(std::string_view s) {
    if (s == "paper") return EvaluationProtocol::Mode::Paper;
    if (s == "holdout") return EvaluationProtocol::Mode::Holdout;
    return std::nullopt;
}

namespace {

std::vector<double> cached_features(DescriptorId id, const DescriptorConfig& cfg,
                                    const RasterImage& img, FeatureCache* cache) {
    if (!cache) return extract(id, img, cfg).values;
    return cache->get_or_compute(id, cfg, img,
                                 [&] { return extract(id, img, cfg).values; });
}

// Runs fn(i) for i in [0, n) on `jobs` workers; output slots are
// preallocated by the caller so the result is order-independent.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    const int count = std::min<int>(jobs, static_cast<int>(n));
    threads.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

Materialized materialize(std::span<const Sample> samples,
                         const std::vector<std::string>& class_names,
                         const EvaluationProtocol& protocol, DescriptorId descriptor,
                         const DescriptorConfig& cfg, FeatureCache* cache, int jobs) {
    protocol.validate();
    cfg.validate();
    if (samples.empty()) throw std::invalid_argument("materialize: no samples");

    // Partition into train originals and group sources.
    std::vector<const Sample*> train_side;
    std::vector<const Sample*> group_side;
    if (protocol.mode == EvaluationProtocol::Mode::Paper) {
        for (const auto& s : samples) {
            train_side.push_back(&s);
            group_side.push_back(&s);
        }
    } else {
        // Per-class split of the drawn order (already seeded-shuffled by
        // draw_balanced): head goes to train, tail is held out.
        std::vector<std::vector<const Sample*>> by_class(class_names.size());
        for (const auto& s : samples)
            by_class[static_cast<std::size_t>(s.label)].push_back(&s);
        for (std::size_t c = 0; c < by_class.size(); ++c) {
            const auto& members = by_class[c];
            if (members.empty()) continue;
            if (members.size() < 2)
                throw InvalidSplitError("holdout: class '" + class_names[c] +
                                        "' has fewer than two samples");
            const double raw = protocol.test_fraction * static_cast<double>(members.size());
            auto n_test = static_cast<std::size_t>(std::floor(raw + 0.5));
            n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
            const std::size_t n_train = members.size() - n_test;
            for (std::size_t i = 0; i < members.size(); ++i)
                (i < n_train ? train_side : group_side).push_back(members[i]);
        }
    }

    Materialized out;
    out.train.class_names = class_names;
    out.train.features.resize(train_side.size());
    out.train.labels.resize(train_side.size());
    out.groups.resize(group_side.size());

    parallel_for(train_side.size(), jobs, [&](std::size_t i) {
        const Sample& s = *train_side[i];
        const RasterImage img = decode_image(s.path);
        out.train.features[i] = cached_features(descriptor, cfg, img, cache);
        out.train.labels[i] = s.label;
    });

    parallel_for(group_side.size(), jobs, [&](std::size_t i) {
        const Sample& s = *group_side[i];
        const RasterImage img = decode_image(s.path);
        AugmentedGroup group =
            build_group(img, s.path.string(), s.label, protocol.augment);
        GroupFeatures gf;
        gf.source_id = group.source_id;
        gf.label = s.label;
        gf.variants.reserve(group.variants.size());
        for (const auto& variant : group.variants)
            gf.variants.push_back(cached_features(descriptor, cfg, variant, cache));
        out.groups[i] = std::move(gf);
    });

    return out;
}

}  // namespace rvote
