#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rvote/classifier.hpp"
#include "rvote/rng.hpp"

namespace rvote {

struct SplitCandidate {
    double threshold = 0.0;
    double gain = 0.0;           // information gain, bits
    double split_entropy = 0.0;  // entropy of the two-way partition, bits
    double gain_ratio = 0.0;     // gain / split_entropy
};

double entropy_bits(std::span<const std::size_t> counts, std::size_t total);

// Best binary split of one numeric feature by gain ratio, evaluating
// midpoints between consecutive distinct sorted values. Candidates leaving
// fewer than min_leaf samples on a side are skipped. Returns nullopt when no
// candidate exists (all values identical, or min_leaf unsatisfiable).
// A pure set still yields its best threshold with gain 0.
std::optional<SplitCandidate> split_gain(std::span<const double> values,
                                         std::span<const int> labels, int class_count,
                                         int min_leaf = 1);

// Gain-ratio binary tree over numeric features; shared by the C4.5 model and
// the forest. An impure node splits whenever a valid candidate exists (even
// at zero gain), so distinct rows always separate; growth stops at purity,
// min_leaf, or constant features.
class DecisionTree {
public:
    struct GrowOptions {
        int min_leaf = 2;
        int features_per_split = 0;  // 0 = all features
        SplitMix64* rng = nullptr;   // required when features_per_split > 0
        bool prune = false;          // pessimistic error pruning (CF = 0.25)
    };

    static DecisionTree grow(const LabeledDataset& data, std::span<const std::size_t> rows,
                             const GrowOptions& opts);

    // Training-class frequencies at the reached leaf.
    ProbDist predict(std::span<const double> x) const;

    std::size_t node_count() const { return nodes_.size(); }

    void save(std::ostream&) const;
    static DecisionTree load(std::istream&);

private:
    struct Node {
        int feature = -1;  // -1: leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        ProbDist dist;  // leaves only
    };

    std::vector<Node> nodes_;  // nodes_[0] is the root
};

}  // namespace rvote
