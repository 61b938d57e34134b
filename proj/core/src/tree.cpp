#include "rvote/tree.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "models.hpp"
#include "rvote/errors.hpp"

namespace rvote {

double entropy_bits(std::span<const std::size_t> counts, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

std::optional<SplitCandidate> split_gain(std::span<const double> values,
                                         std::span<const int> labels, int class_count,
                                         int min_leaf) {
    const std::size_t n = values.size();
    if (n < 2 || labels.size() != n)
        throw std::invalid_argument("split_gain: need >= 2 aligned samples");
    if (min_leaf < 1) throw std::invalid_argument("split_gain: min_leaf must be >= 1");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<std::size_t> total_counts(static_cast<std::size_t>(class_count), 0);
    for (int y : labels) ++total_counts[static_cast<std::size_t>(y)];
    const double h_all = entropy_bits(total_counts, n);

    std::vector<std::size_t> left_counts(static_cast<std::size_t>(class_count), 0);
    std::optional<SplitCandidate> best;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t idx = order[i];
        ++left_counts[static_cast<std::size_t>(labels[idx])];
        const double v = values[idx];
        const double v_next = values[order[i + 1]];
        if (v == v_next) continue;  // only boundaries between distinct values
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < static_cast<std::size_t>(min_leaf) ||
            n_right < static_cast<std::size_t>(min_leaf))
            continue;

        std::vector<std::size_t> right_counts(total_counts);
        for (std::size_t c = 0; c < right_counts.size(); ++c) right_counts[c] -= left_counts[c];

        const double pl = static_cast<double>(n_left) / static_cast<double>(n);
        const double pr = static_cast<double>(n_right) / static_cast<double>(n);
        SplitCandidate cand;
        cand.threshold = (v + v_next) / 2.0;
        cand.gain = h_all - pl * entropy_bits(left_counts, n_left) -
                    pr * entropy_bits(right_counts, n_right);
        cand.split_entropy = -(pl * std::log2(pl) + pr * std::log2(pr));
        cand.gain_ratio = cand.split_entropy > 0.0 ? cand.gain / cand.split_entropy : 0.0;
        if (!best || cand.gain_ratio > best->gain_ratio) best = cand;
    }
    return best;
}

namespace {

struct TempNode {
    int feature = -1;
    double threshold = 0.0;
    std::unique_ptr<TempNode> left, right;
    ProbDist dist;
    std::size_t n = 0;
    std::size_t errors = 0;  // samples not of the majority class

    bool is_leaf() const { return feature < 0; }
};

// Quinlan's pessimistic upper bound of the error count at CF = 0.25
// (z = inverse normal at 0.75).
double pessimistic_errors(std::size_t errors, std::size_t n) {
    constexpr double z = 0.6744897501960817;
    if (n == 0) return 0.0;
    const double f = static_cast<double>(errors) / static_cast<double>(n);
    const double nn = static_cast<double>(n);
    const double u = (f + z * z / (2.0 * nn) +
                      z * std::sqrt(f / nn - f * f / nn + z * z / (4.0 * nn * nn))) /
                     (1.0 + z * z / nn);
    return u * nn;
}

ProbDist leaf_distribution(const std::vector<std::size_t>& counts, std::size_t n) {
    ProbDist dist(counts.size(), 0.0);
    for (std::size_t c = 0; c < counts.size(); ++c)
        dist[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
    return dist;
}

std::unique_ptr<TempNode> grow_temp(const LabeledDataset& data, std::vector<std::size_t>& rows,
                                    const DecisionTree::GrowOptions& opts) {
    auto node = std::make_unique<TempNode>();
    node->n = rows.size();

    std::vector<std::size_t> counts(static_cast<std::size_t>(data.class_count()), 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(data.labels[r])];
    const std::size_t majority = *std::max_element(counts.begin(), counts.end());
    node->errors = rows.size() - majority;
    node->dist = leaf_distribution(counts, rows.size());

    const bool pure = majority == rows.size();
    if (pure || rows.size() < 2 * static_cast<std::size_t>(opts.min_leaf)) return node;

    // Candidate features: all, or a seeded subset (sorted, so iteration
    // order matches the full-feature path when the subset covers everything).
    const std::size_t d = data.dims();
    std::vector<std::size_t> feats;
    if (opts.features_per_split <= 0 ||
        static_cast<std::size_t>(opts.features_per_split) >= d) {
        feats.resize(d);
        std::iota(feats.begin(), feats.end(), 0);
    } else {
        std::vector<std::size_t> pool(d);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < opts.features_per_split; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(i) + static_cast<std::size_t>(opts.rng->below(
                                                  d - static_cast<std::size_t>(i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        feats.assign(pool.begin(), pool.begin() + opts.features_per_split);
        std::sort(feats.begin(), feats.end());
    }

    int best_feature = -1;
    SplitCandidate best;
    std::vector<double> vals(rows.size());
    std::vector<int> labs(rows.size());
    for (std::size_t f : feats) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            vals[i] = data.features[rows[i]][f];
            labs[i] = data.labels[rows[i]];
        }
        const auto cand = split_gain(vals, labs, data.class_count(), opts.min_leaf);
        if (!cand) continue;
        if (best_feature < 0 || cand->gain_ratio > best.gain_ratio) {
            best_feature = static_cast<int>(f);
            best = *cand;
        }
    }
    if (best_feature < 0) return node;  // no valid candidate anywhere

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        if (data.features[r][static_cast<std::size_t>(best_feature)] <= best.threshold)
            left_rows.push_back(r);
        else
            right_rows.push_back(r);
    }
    node->feature = best_feature;
    node->threshold = best.threshold;
    node->left = grow_temp(data, left_rows, opts);
    node->right = grow_temp(data, right_rows, opts);

    if (opts.prune) {
        // Collapse when the node-as-leaf error bound does not exceed the
        // subtree's.
        auto subtree_errors = [](const TempNode& t, auto&& self) -> double {
            if (t.is_leaf()) return pessimistic_errors(t.errors, t.n);
            return self(*t.left, self) + self(*t.right, self);
        };
        const double as_leaf = pessimistic_errors(node->errors, node->n);
        const double as_tree = subtree_errors(*node, subtree_errors);
        if (as_leaf <= as_tree) {
            node->feature = -1;
            node->left.reset();
            node->right.reset();
        }
    }
    return node;
}

}  // namespace

DecisionTree DecisionTree::grow(const LabeledDataset& data, std::span<const std::size_t> rows,
                                const GrowOptions& opts) {
    if (rows.empty()) throw std::invalid_argument("DecisionTree: no training rows");
    if (opts.min_leaf < 1) throw std::invalid_argument("DecisionTree: min_leaf must be >= 1");
    if (opts.features_per_split > 0 && opts.rng == nullptr)
        throw std::invalid_argument("DecisionTree: feature sampling needs an rng");

    std::vector<std::size_t> work(rows.begin(), rows.end());
    auto root = grow_temp(data, work, opts);

    DecisionTree tree;
    // Flatten depth-first, parents before children.
    auto flatten = [&tree](const TempNode& t, auto&& self) -> int {
        const int idx = static_cast<int>(tree.nodes_.size());
        tree.nodes_.emplace_back();
        if (t.is_leaf()) {
            tree.nodes_[static_cast<std::size_t>(idx)].dist = t.dist;
        } else {
            tree.nodes_[static_cast<std::size_t>(idx)].feature = t.feature;
            tree.nodes_[static_cast<std::size_t>(idx)].threshold = t.threshold;
            const int l = self(*t.left, self);
            const int r = self(*t.right, self);
            tree.nodes_[static_cast<std::size_t>(idx)].left = l;
            tree.nodes_[static_cast<std::size_t>(idx)].right = r;
        }
        return idx;
    };
    flatten(*root, flatten);
    return tree;
}

ProbDist DecisionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                         ? node.left
                                         : node.right);
    }
    return nodes_[i].dist;
}

void DecisionTree::save(std::ostream& os) const {
    os << "tree " << nodes_.size() << "\n";
    for (const auto& node : nodes_) {
        if (node.feature >= 0) {
            os << "s " << node.feature << ' ';
            detail::write_double(os, node.threshold);
            os << ' ' << node.left << ' ' << node.right << "\n";
        } else {
            os << "l " << node.dist.size();
            for (double v : node.dist) {
                os << ' ';
                detail::write_double(os, v);
            }
            os << "\n";
        }
    }
}

DecisionTree DecisionTree::load(std::istream& is) {
    detail::expect_token(is, "tree");
    std::size_t count = 0;
    if (!(is >> count) || count == 0) throw IoError("tree: bad node count");
    DecisionTree tree;
    tree.nodes_.resize(count);
    for (auto& node : tree.nodes_) {
        std::string kind;
        if (!(is >> kind)) throw IoError("tree: truncated nodes");
        if (kind == "s") {
            if (!(is >> node.feature)) throw IoError("tree: bad split");
            node.threshold = detail::read_double(is);
            if (!(is >> node.left >> node.right)) throw IoError("tree: bad children");
        } else if (kind == "l") {
            std::size_t c = 0;
            if (!(is >> c)) throw IoError("tree: bad leaf");
            node.dist.resize(c);
            for (double& v : node.dist) v = detail::read_double(is);
        } else {
            throw IoError("tree: unknown node kind: " + kind);
        }
    }
    return tree;
}

}  // namespace rvote

namespace rvote::detail {

C45Model::C45Model(const ClassifierSpec& spec, const LabeledDataset& data) {
    spec_ = spec;
    class_names_ = data.class_names;
    dims_ = data.dims();
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), 0);
    DecisionTree::GrowOptions opts;
    opts.min_leaf = spec.c45.min_leaf;
    opts.prune = spec.c45.prune;
    tree_ = DecisionTree::grow(data, rows, opts);
}

ProbDist C45Model::predict_proba(std::span<const double> x) const {
    check_input(x);
    return tree_.predict(x);
}

void C45Model::save_payload(std::ostream& os) const { tree_.save(os); }

C45Model::C45Model(const ClassifierSpec& spec, std::vector<std::string> class_names,
                   std::size_t dims, std::istream& payload) {
    spec_ = spec;
    class_names_ = std::move(class_names);
    dims_ = dims;
    tree_ = DecisionTree::load(payload);
}

}  // namespace rvote::detail
