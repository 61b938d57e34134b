#include <cmath>
#include <numeric>
#include <ostream>

#include "models.hpp"
#include "rvote/errors.hpp"
#include "rvote/rng.hpp"

namespace rvote::detail {

RandomForestModel::RandomForestModel(const ClassifierSpec& spec, const LabeledDataset& data) {
    spec_ = spec;
    class_names_ = data.class_names;
    dims_ = data.dims();

    const std::size_t n = data.size();
    int features_per_split = 0;  // all
    if (spec.rf.features_per_split == FeatureSubset::Sqrt)
        features_per_split = std::max(
            1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(data.dims())))));

    trees_.reserve(static_cast<std::size_t>(spec.rf.trees));
    // Per-tree seeds come from a fixed splitmix sequence off the master
    // seed, so tree t is reproducible no matter how trees are scheduled.
    for (int t = 0; t < spec.rf.trees; ++t) {
        SplitMix64 rng(mix_seed(spec.rf.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows(n);
        if (spec.rf.bootstrap) {
            for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        DecisionTree::GrowOptions opts;
        opts.min_leaf = spec.rf.min_leaf;
        opts.features_per_split = features_per_split;
        opts.rng = &rng;
        trees_.push_back(DecisionTree::grow(data, rows, opts));
    }
}

ProbDist RandomForestModel::predict_proba(std::span<const double> x) const {
    check_input(x);
    ProbDist acc(class_names_.size(), 0.0);
    for (const auto& tree : trees_) {
        const ProbDist d = tree.predict(x);
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += d[c];
    }
    double sum = 0.0;
    for (double v : acc) sum += v;
    if (sum > 0.0)
        for (double& v : acc) v /= sum;
    return acc;
}

void RandomForestModel::save_payload(std::ostream& os) const {
    os << "forest " << trees_.size() << "\n";
    for (const auto& tree : trees_) tree.save(os);
}

RandomForestModel::RandomForestModel(const ClassifierSpec& spec,
                                     std::vector<std::string> class_names, std::size_t dims,
                                     std::istream& payload) {
    spec_ = spec;
    class_names_ = std::move(class_names);
    dims_ = dims;
    expect_token(payload, "forest");
    std::size_t count = 0;
    if (!(payload >> count) || count == 0) throw IoError("forest: bad tree count");
    trees_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) trees_.push_back(DecisionTree::load(payload));
}

}  // namespace rvote::detail
