#include <algorithm>
#include <cmath>
#include <ostream>

#include "models.hpp"
#include "rvote/errors.hpp"

namespace rvote::detail {

KnnModel::KnnModel(const ClassifierSpec& spec, const LabeledDataset& data) {
    spec_ = spec;
    class_names_ = data.class_names;
    dims_ = data.dims();
    train_x_ = data.features;
    train_y_ = data.labels;
}

ProbDist KnnModel::predict_proba(std::span<const double> x) const {
    check_input(x);
    const std::size_t n = train_x_.size();
    std::vector<std::pair<double, std::size_t>> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = train_x_[i];
        double d = 0.0;
        if (spec_.knn.metric == DistanceMetric::Euclidean) {
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double diff = row[j] - x[j];
                d += diff * diff;
            }
        } else {
            for (std::size_t j = 0; j < x.size(); ++j) d += std::fabs(row[j] - x[j]);
        }
        order[i] = {d, i};
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(spec_.knn.k), n);
    // (distance, index) pairs make neighbor selection deterministic under ties.
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());

    ProbDist dist(class_names_.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i)
        dist[static_cast<std::size_t>(train_y_[order[i].second])] += 1.0;
    for (double& v : dist) v /= static_cast<double>(k);
    return dist;
}

void KnnModel::save_payload(std::ostream& os) const {
    os << "rows " << train_x_.size() << "\n";
    for (std::size_t i = 0; i < train_x_.size(); ++i) {
        os << train_y_[i];
        for (double v : train_x_[i]) {
            os << ' ';
            write_double(os, v);
        }
        os << "\n";
    }
}

KnnModel::KnnModel(const ClassifierSpec& spec, std::vector<std::string> class_names,
                   std::size_t dims, std::istream& payload) {
    spec_ = spec;
    class_names_ = std::move(class_names);
    dims_ = dims;
    expect_token(payload, "rows");
    std::size_t n = 0;
    if (!(payload >> n)) throw IoError("knn: bad row count");
    train_x_.resize(n, std::vector<double>(dims_));
    train_y_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(payload >> train_y_[i])) throw IoError("knn: truncated labels");
        for (std::size_t j = 0; j < dims_; ++j) train_x_[i][j] = read_double(payload);
    }
}

}  // namespace rvote::detail
