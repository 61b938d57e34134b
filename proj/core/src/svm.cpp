#include "rvote/svm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "models.hpp"
#include "rvote/errors.hpp"

namespace rvote {

double BinarySvm::decision(std::span<const double> x) const {
    double f = bias;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (alphas[i] == 0.0) continue;
        f += alphas[i] * labels[i] * kernel(points[i], x);
    }
    return f;
}

double PlattSigmoid::operator()(double f) const {
    const double z = a * f + b;
    // Evaluate the stable branch to avoid overflow on large |z|.
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

namespace {

class SmoSolver {
public:
    SmoSolver(std::span<const std::vector<double>> points, std::span<const int> labels,
              const SmoOptions& opts)
        : x_(points), y_(labels), opts_(opts), n_(points.size()) {
        alphas_.assign(n_, 0.0);
        errors_.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
        kernel_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j) {
                const double k = opts_.kernel(x_[i], x_[j]);
                kernel_[i * n_ + j] = k;
                kernel_[j * n_ + i] = k;
            }
    }

    void solve() {
        for (int epoch = 0; epoch < opts_.max_epochs; ++epoch) {
            std::size_t changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                const double r = errors_[i] * y_[i];
                const bool violates = (r < -opts_.tolerance && alphas_[i] < opts_.c) ||
                                      (r > opts_.tolerance && alphas_[i] > 0.0);
                if (!violates) continue;
                if (step(i, second_choice(i))) {
                    ++changed;
                    continue;
                }
                for (std::size_t j = 0; j < n_; ++j) {
                    if (j != i && step(i, j)) {
                        ++changed;
                        break;
                    }
                }
            }
            if (changed == 0) break;  // clean pass: KKT satisfied within tolerance
        }
    }

    std::vector<double> take_alphas() { return std::move(alphas_); }
    double bias() const { return bias_; }

private:
    double k(std::size_t i, std::size_t j) const { return kernel_[i * n_ + j]; }

    std::size_t second_choice(std::size_t i) const {
        std::size_t best = i == 0 ? 1 : 0;
        double best_gap = -1.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i) continue;
            const double gap = std::fabs(errors_[i] - errors_[j]);
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        return best;
    }

    double dual_objective() const {
        double obj = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alphas_[i] == 0.0) continue;
            obj += alphas_[i];
            for (std::size_t j = 0; j < n_; ++j) {
                if (alphas_[j] == 0.0) continue;
                obj -= 0.5 * alphas_[i] * alphas_[j] * y_[i] * y_[j] * k(i, j);
            }
        }
        return obj;
    }

    bool step(std::size_t i, std::size_t j) {
        if (i == j) return false;
        const double ai = alphas_[i];
        const double aj = alphas_[j];
        const double yi = y_[i];
        const double yj = y_[j];
        const double ei = errors_[i];
        const double ej = errors_[j];
        const double s = yi * yj;

        double lo, hi;
        if (yi != yj) {
            lo = std::max(0.0, aj - ai);
            hi = std::min(opts_.c, opts_.c + aj - ai);
        } else {
            lo = std::max(0.0, ai + aj - opts_.c);
            hi = std::min(opts_.c, ai + aj);
        }
        if (lo >= hi) return false;

        const double kii = k(i, i), kjj = k(j, j), kij = k(i, j);
        const double eta = kii + kjj - 2.0 * kij;
        double aj_new;
        if (eta > 0.0) {
            aj_new = std::clamp(aj + yj * (ei - ej) / eta, lo, hi);
        } else {
            // Flat direction: evaluate the objective at both clip ends.
            const double f1 = yi * (ei + bias_) - ai * kii - s * aj * kij;
            const double f2 = yj * (ej + bias_) - s * ai * kij - aj * kjj;
            const double l1 = ai + s * (aj - lo);
            const double h1 = ai + s * (aj - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * kii +
                                  0.5 * lo * lo * kjj + s * lo * l1 * kij;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * kii +
                                  0.5 * hi * hi * kjj + s * hi * h1 * kij;
            if (obj_lo < obj_hi - kEps)
                aj_new = lo;
            else if (obj_lo > obj_hi + kEps)
                aj_new = hi;
            else
                return false;
        }
        if (std::fabs(aj_new - aj) < kEps * (aj_new + aj + kEps)) return false;
        const double ai_new = ai + s * (aj - aj_new);

        const double b1 = bias_ - ei - yi * (ai_new - ai) * kii - yj * (aj_new - aj) * kij;
        const double b2 = bias_ - ej - yi * (ai_new - ai) * kij - yj * (aj_new - aj) * kjj;
        const double bias_old = bias_;
        if (ai_new > 0.0 && ai_new < opts_.c)
            bias_ = b1;
        else if (aj_new > 0.0 && aj_new < opts_.c)
            bias_ = b2;
        else
            bias_ = (b1 + b2) / 2.0;

        alphas_[i] = ai_new;
        alphas_[j] = aj_new;
        const double di = yi * (ai_new - ai);
        const double dj = yj * (aj_new - aj);
        const double db = bias_ - bias_old;
        for (std::size_t t = 0; t < n_; ++t) errors_[t] += di * k(i, t) + dj * k(j, t) + db;

        if (opts_.objective_observer) opts_.objective_observer(dual_objective());
        return true;
    }

    static constexpr double kEps = 1e-12;

    std::span<const std::vector<double>> x_;
    std::span<const int> y_;
    const SmoOptions& opts_;
    std::size_t n_;
    std::vector<double> alphas_;
    std::vector<double> errors_;  // f(x_i) - y_i, kept current
    std::vector<double> kernel_;
    double bias_ = 0.0;
};

}  // namespace

BinarySvm solve_binary_svm(std::span<const std::vector<double>> points,
                           std::span<const int> labels, const SmoOptions& opts) {
    if (points.empty() || points.size() != labels.size())
        throw std::invalid_argument("solve_binary_svm: bad input sizes");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1)
            has_pos = true;
        else if (y == -1)
            has_neg = true;
        else
            throw std::invalid_argument("solve_binary_svm: labels must be -1/+1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("solve_binary_svm: both classes required");
    if (!(opts.c > 0.0) || !(opts.tolerance > 0.0))
        throw std::invalid_argument("solve_binary_svm: c and tolerance must be > 0");

    SmoSolver solver(points, labels, opts);
    solver.solve();

    BinarySvm svm;
    svm.points.assign(points.begin(), points.end());
    svm.labels.assign(labels.begin(), labels.end());
    svm.alphas = solver.take_alphas();
    svm.bias = solver.bias();
    svm.kernel = opts.kernel;
    return svm;
}

PlattSigmoid fit_platt(std::span<const double> decisions, std::span<const int> targets) {
    if (decisions.size() != targets.size() || decisions.empty())
        throw std::invalid_argument("fit_platt: bad input sizes");
    const std::size_t n = decisions.size();
    double prior1 = 0.0;
    for (int t : targets) prior1 += t != 0 ? 1.0 : 0.0;
    const double prior0 = static_cast<double>(n) - prior1;

    // Lin/Weng-style regularized Newton on the cross-entropy of the sigmoid.
    const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo_target = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = targets[i] != 0 ? hi_target : lo_target;

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    constexpr double min_step = 1e-10;
    constexpr double sigma = 1e-12;

    auto objective = [&](double pa, double pb) {
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = decisions[i] * pa + pb;
            if (z >= 0.0)
                err += t[i] * z + std::log1p(std::exp(-z));
            else
                err += (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return err;
    };

    double fval = objective(a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = decisions[i] * a + b;
            double p, q;
            if (z >= 0.0) {
                const double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                const double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            const double d2 = p * q;
            h11 += decisions[i] * decisions[i] * d2;
            h22 += d2;
            h21 += decisions[i] * d2;
            const double d1 = t[i] - p;
            g1 += decisions[i] * d1;
            g2 += d1;
        }
        if (std::fabs(g1) < 1e-5 && std::fabs(g2) < 1e-5) break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        while (step >= min_step) {
            const double new_a = a + step * da;
            const double new_b = b + step * db;
            const double new_f = objective(new_a, new_b);
            if (new_f < fval + 1e-4 * step * gd) {
                a = new_a;
                b = new_b;
                fval = new_f;
                break;
            }
            step /= 2.0;
        }
        if (step < min_step) break;  // line search failed
    }
    return PlattSigmoid{a, b};
}

void BinarySvm::save(std::ostream& os) const {
    os << "svm " << points.size() << ' ' << (points.empty() ? 0 : points.front().size()) << ' '
       << (kernel.type == KernelSpec::Type::Rbf ? "rbf" : "linear") << ' ';
    detail::write_double(os, kernel.gamma);
    os << ' ';
    detail::write_double(os, bias);
    os << "\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        os << labels[i] << ' ';
        detail::write_double(os, alphas[i]);
        for (double v : points[i]) {
            os << ' ';
            detail::write_double(os, v);
        }
        os << "\n";
    }
}

BinarySvm BinarySvm::load(std::istream& is) {
    detail::expect_token(is, "svm");
    std::size_t n = 0, d = 0;
    std::string kernel_kind;
    if (!(is >> n >> d >> kernel_kind)) throw IoError("svm: bad header");
    BinarySvm svm;
    svm.kernel.type =
        kernel_kind == "rbf" ? KernelSpec::Type::Rbf : KernelSpec::Type::Linear;
    svm.kernel.gamma = detail::read_double(is);
    svm.bias = detail::read_double(is);
    svm.points.assign(n, std::vector<double>(d));
    svm.labels.resize(n);
    svm.alphas.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(is >> svm.labels[i])) throw IoError("svm: truncated rows");
        svm.alphas[i] = detail::read_double(is);
        for (std::size_t j = 0; j < d; ++j) svm.points[i][j] = detail::read_double(is);
    }
    return svm;
}

}  // namespace rvote

namespace rvote::detail {

SmoModel::SmoModel(const ClassifierSpec& spec, const LabeledDataset& data) {
    spec_ = spec;
    class_names_ = data.class_names;
    dims_ = data.dims();

    const int c = data.class_count();
    std::vector<std::size_t> present_count(static_cast<std::size_t>(c), 0);
    for (int y : data.labels) ++present_count[static_cast<std::size_t>(y)];
    int present = 0;
    for (std::size_t k = 0; k < present_count.size(); ++k)
        if (present_count[k] > 0) ++present;
    if (present < 2)
        throw DegenerateModelError("smo: training data contains fewer than two classes");

    SmoOptions opts;
    opts.c = spec.smo.c;
    opts.tolerance = spec.smo.tolerance;
    opts.kernel = spec.smo.kernel;

    // One-vs-one over the classes actually present, in index order.
    for (int a = 0; a < c; ++a) {
        if (present_count[static_cast<std::size_t>(a)] == 0) continue;
        for (int b = a + 1; b < c; ++b) {
            if (present_count[static_cast<std::size_t>(b)] == 0) continue;
            std::vector<std::vector<double>> points;
            std::vector<int> labels;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (data.labels[i] == a) {
                    points.push_back(data.features[i]);
                    labels.push_back(1);
                } else if (data.labels[i] == b) {
                    points.push_back(data.features[i]);
                    labels.push_back(-1);
                }
            }
            Pair pair;
            pair.class_a = a;
            pair.class_b = b;
            pair.svm = solve_binary_svm(points, labels, opts);
            if (spec.smo.calibrate) {
                std::vector<double> decisions(points.size());
                std::vector<int> targets(points.size());
                for (std::size_t i = 0; i < points.size(); ++i) {
                    decisions[i] = pair.svm.decision(points[i]);
                    targets[i] = labels[i] == 1 ? 1 : 0;
                }
                pair.sigmoid = fit_platt(decisions, targets);
            }
            pairs_.push_back(std::move(pair));
        }
    }
}

ProbDist SmoModel::predict_proba(std::span<const double> x) const {
    check_input(x);
    ProbDist dist(class_names_.size(), 0.0);
    for (const auto& pair : pairs_) {
        const double f = pair.svm.decision(x);
        if (spec_.smo.calibrate) {
            const double p = pair.sigmoid(f);
            dist[static_cast<std::size_t>(pair.class_a)] += p;
            dist[static_cast<std::size_t>(pair.class_b)] += 1.0 - p;
        } else {
            ++dist[static_cast<std::size_t>(f >= 0.0 ? pair.class_a : pair.class_b)];
        }
    }
    double sum = 0.0;
    for (double v : dist) sum += v;
    if (sum > 0.0)
        for (double& v : dist) v /= sum;
    return dist;
}

void SmoModel::save_payload(std::ostream& os) const {
    os << "pairs " << pairs_.size() << "\n";
    for (const auto& pair : pairs_) {
        os << pair.class_a << ' ' << pair.class_b << ' ';
        write_double(os, pair.sigmoid.a);
        os << ' ';
        write_double(os, pair.sigmoid.b);
        os << "\n";
        pair.svm.save(os);
    }
}

SmoModel::SmoModel(const ClassifierSpec& spec, std::vector<std::string> class_names,
                   std::size_t dims, std::istream& payload) {
    spec_ = spec;
    class_names_ = std::move(class_names);
    dims_ = dims;
    expect_token(payload, "pairs");
    std::size_t count = 0;
    if (!(payload >> count)) throw IoError("smo: bad pair count");
    pairs_.resize(count);
    for (auto& pair : pairs_) {
        if (!(payload >> pair.class_a >> pair.class_b)) throw IoError("smo: truncated pairs");
        pair.sigmoid.a = read_double(payload);
        pair.sigmoid.b = read_double(payload);
        pair.svm = BinarySvm::load(payload);
    }
}

}  // namespace rvote::detail
