#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "models.hpp"
#include "rvote/errors.hpp"

namespace rvote::detail {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

NaiveBayesModel::NaiveBayesModel(const ClassifierSpec& spec, const LabeledDataset& data) {
    spec_ = spec;
    class_names_ = data.class_names;
    dims_ = data.dims();

    const std::size_t c = class_names_.size();
    const std::size_t d = dims_;
    const std::size_t n = data.size();

    // Global per-feature range scales the variance floor.
    std::vector<double> range(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double lo = data.features[0][j], hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, data.features[i][j]);
            hi = std::max(hi, data.features[i][j]);
        }
        range[j] = hi - lo;
    }

    means_.assign(c, std::vector<double>(d, 0.0));
    variances_.assign(c, std::vector<double>(d, 0.0));
    log_priors_.assign(c, kNegInf);
    std::vector<std::size_t> counts(c, 0);

    for (std::size_t i = 0; i < n; ++i)
        ++counts[static_cast<std::size_t>(data.labels[i])];
    for (std::size_t i = 0; i < n; ++i) {
        const auto y = static_cast<std::size_t>(data.labels[i]);
        for (std::size_t j = 0; j < d; ++j) means_[y][j] += data.features[i][j];
    }
    for (std::size_t k = 0; k < c; ++k)
        if (counts[k] > 0)
            for (std::size_t j = 0; j < d; ++j) means_[k][j] /= static_cast<double>(counts[k]);
    for (std::size_t i = 0; i < n; ++i) {
        const auto y = static_cast<std::size_t>(data.labels[i]);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = data.features[i][j] - means_[y][j];
            variances_[y][j] += diff * diff;
        }
    }
    const double vf = spec.nb.variance_floor;
    for (std::size_t k = 0; k < c; ++k) {
        if (counts[k] == 0) continue;  // absent class: no density, prior stays -inf
        // Laplace prior: (count + 1) / (N + C).
        log_priors_[k] = std::log(static_cast<double>(counts[k] + 1) /
                                  static_cast<double>(n + c));
        for (std::size_t j = 0; j < d; ++j) {
            // Maximum-likelihood (population) variance, floored so constant
            // descriptor bins survive.
            double v = variances_[k][j] / static_cast<double>(counts[k]);
            variances_[k][j] = std::max(v, std::max(vf, vf * range[j] * range[j]));
        }
    }
}

ProbDist NaiveBayesModel::predict_proba(std::span<const double> x) const {
    check_input(x);
    const std::size_t c = class_names_.size();
    std::vector<double> log_post(c, kNegInf);
    double max_lp = kNegInf;
    for (std::size_t k = 0; k < c; ++k) {
        if (log_priors_[k] == kNegInf) continue;
        double lp = log_priors_[k];
        for (std::size_t j = 0; j < dims_; ++j) {
            const double v = variances_[k][j];
            const double diff = x[j] - means_[k][j];
            lp += -0.5 * std::log(2.0 * M_PI * v) - diff * diff / (2.0 * v);
        }
        log_post[k] = lp;
        max_lp = std::max(max_lp, lp);
    }
    ProbDist dist(c, 0.0);
    if (max_lp == kNegInf) return dist;
    double sum = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        if (log_post[k] == kNegInf) continue;
        dist[k] = std::exp(log_post[k] - max_lp);
        sum += dist[k];
    }
    for (double& v : dist) v /= sum;
    return dist;
}

void NaiveBayesModel::save_payload(std::ostream& os) const {
    os << "gauss\n";
    for (std::size_t k = 0; k < class_names_.size(); ++k) {
        write_double(os, log_priors_[k]);
        for (std::size_t j = 0; j < dims_; ++j) {
            os << ' ';
            write_double(os, means_[k][j]);
            os << ' ';
            write_double(os, variances_[k][j]);
        }
        os << "\n";
    }
}

NaiveBayesModel::NaiveBayesModel(const ClassifierSpec& spec, std::vector<std::string> class_names,
                                 std::size_t dims, std::istream& payload) {
    spec_ = spec;
    class_names_ = std::move(class_names);
    dims_ = dims;
    expect_token(payload, "gauss");
    const std::size_t c = class_names_.size();
    means_.assign(c, std::vector<double>(dims_));
    variances_.assign(c, std::vector<double>(dims_));
    log_priors_.assign(c, kNegInf);
    for (std::size_t k = 0; k < c; ++k) {
        log_priors_[k] = read_double(payload);
        for (std::size_t j = 0; j < dims_; ++j) {
            means_[k][j] = read_double(payload);
            variances_[k][j] = read_double(payload);
        }
    }
}

}  // namespace rvote::detail
