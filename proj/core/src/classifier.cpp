#include "rvote/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "models.hpp"
#include "rvote/errors.hpp"
#include "rvote/rng.hpp"

namespace rvote {

void LabeledDataset::validate() const {
    if (features.empty()) throw std::invalid_argument("dataset: empty");
    if (labels.size() != features.size())
        throw std::invalid_argument("dataset: labels/features size mismatch");
    if (class_names.empty()) throw std::invalid_argument("dataset: no class names");
    const std::size_t d = features.front().size();
    if (d == 0) throw std::invalid_argument("dataset: zero-dimensional features");
    for (const auto& row : features)
        if (row.size() != d) throw std::invalid_argument("dataset: ragged feature rows");
    for (int y : labels)
        if (y < 0 || y >= class_count())
            throw std::invalid_argument("dataset: label out of range");
}

int argmax_lowest(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
    return best;
}

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const {
    if (type == Type::Linear) {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return dot;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

std::string ClassifierSpec::name() const {
    switch (algorithm) {
        case Algorithm::Knn: return std::to_string(knn.k) + "NN";
        case Algorithm::C45: return "J48";
        case Algorithm::NaiveBayes: return "NB";
        case Algorithm::RandomForest: return "RF";
        case Algorithm::Smo: return "SMO";
    }
    return "?";
}

void ClassifierSpec::validate() const {
    switch (algorithm) {
        case Algorithm::Knn:
            if (knn.k < 1) throw std::invalid_argument("knn: k must be >= 1");
            break;
        case Algorithm::C45:
            if (c45.min_leaf < 1) throw std::invalid_argument("c45: min_leaf must be >= 1");
            break;
        case Algorithm::NaiveBayes:
            if (!(nb.variance_floor > 0.0))
                throw std::invalid_argument("nb: variance_floor must be > 0");
            break;
        case Algorithm::RandomForest:
            if (rf.trees < 1) throw std::invalid_argument("rf: trees must be >= 1");
            if (rf.min_leaf < 1) throw std::invalid_argument("rf: min_leaf must be >= 1");
            break;
        case Algorithm::Smo:
            if (!(smo.c > 0.0)) throw std::invalid_argument("smo: c must be > 0");
            if (!(smo.tolerance > 0.0)) throw std::invalid_argument("smo: tolerance must be > 0");
            if (smo.kernel.type == KernelSpec::Type::Rbf && !(smo.kernel.gamma > 0.0))
                throw std::invalid_argument("smo: rbf gamma must be > 0");
            break;
    }
}

ClassifierSpec ClassifierSpec::make_knn(int k) {
    ClassifierSpec s;
    s.algorithm = Algorithm::Knn;
    s.knn.k = k;
    return s;
}
ClassifierSpec ClassifierSpec::make_c45() {
    ClassifierSpec s;
    s.algorithm = Algorithm::C45;
    return s;
}
ClassifierSpec ClassifierSpec::make_nb() {
    ClassifierSpec s;
    s.algorithm = Algorithm::NaiveBayes;
    return s;
}
ClassifierSpec ClassifierSpec::make_rf(int trees, std::uint64_t seed) {
    ClassifierSpec s;
    s.algorithm = Algorithm::RandomForest;
    s.rf.trees = trees;
    s.rf.seed = seed;
    return s;
}
ClassifierSpec ClassifierSpec::make_smo(double c) {
    ClassifierSpec s;
    s.algorithm = Algorithm::Smo;
    s.smo.c = c;
    return s;
}

std::vector<ClassifierSpec> default_classifiers(std::uint64_t seed) {
    return {ClassifierSpec::make_knn(), ClassifierSpec::make_c45(), ClassifierSpec::make_nb(),
            ClassifierSpec::make_rf(100, seed), ClassifierSpec::make_smo()};
}

std::optional<Algorithm> parse_algorithm(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "knn" || lower == "5nn") return Algorithm::Knn;
    if (lower == "c45" || lower == "j48") return Algorithm::C45;
    if (lower == "nb" || lower == "naivebayes") return Algorithm::NaiveBayes;
    if (lower == "rf" || lower == "randomforest") return Algorithm::RandomForest;
    if (lower == "smo" || lower == "svm") return Algorithm::Smo;
    return std::nullopt;
}

const char* algorithm_key(Algorithm a) {
    switch (a) {
        case Algorithm::Knn: return "knn";
        case Algorithm::C45: return "c45";
        case Algorithm::NaiveBayes: return "nb";
        case Algorithm::RandomForest: return "rf";
        case Algorithm::Smo: return "smo";
    }
    return "?";
}

int Model::predict_label(std::span<const double> x) const {
    return argmax_lowest(predict_proba(x));
}

void Model::check_input(std::span<const double> x) const {
    if (x.size() != dims_)
        throw std::invalid_argument("predict: expected " + std::to_string(dims_) +
                                    " features, got " + std::to_string(x.size()));
}

TrainedModel train(const ClassifierSpec& spec, const LabeledDataset& data) {
    spec.validate();
    data.validate();
    switch (spec.algorithm) {
        case Algorithm::Knn: return std::make_unique<detail::KnnModel>(spec, data);
        case Algorithm::C45: return std::make_unique<detail::C45Model>(spec, data);
        case Algorithm::NaiveBayes: return std::make_unique<detail::NaiveBayesModel>(spec, data);
        case Algorithm::RandomForest:
            return std::make_unique<detail::RandomForestModel>(spec, data);
        case Algorithm::Smo: return std::make_unique<detail::SmoModel>(spec, data);
    }
    throw std::invalid_argument("train: unknown algorithm");
}

namespace detail {

void write_double(std::ostream& os, double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    os << buf;
}

double read_double(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw IoError("model: truncated double");
    return std::strtod(tok.c_str(), nullptr);
}

void expect_token(std::istream& is, const char* token) {
    std::string tok;
    if (!(is >> tok) || tok != token)
        throw IoError(std::string("model: expected '") + token + "', got '" + tok + "'");
}

}  // namespace detail

namespace {

const char* metric_key(DistanceMetric m) {
    return m == DistanceMetric::Euclidean ? "euclidean" : "manhattan";
}

const char* kernel_key(KernelSpec::Type t) {
    return t == KernelSpec::Type::Linear ? "linear" : "rbf";
}

std::string double_token(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

}  // namespace

std::string spec_to_line(const ClassifierSpec& s) {
    std::ostringstream os;
    os << "algo=" << algorithm_key(s.algorithm);
    switch (s.algorithm) {
        case Algorithm::Knn:
            os << " k=" << s.knn.k << " metric=" << metric_key(s.knn.metric);
            break;
        case Algorithm::C45:
            os << " min_leaf=" << s.c45.min_leaf << " prune=" << (s.c45.prune ? 1 : 0);
            break;
        case Algorithm::NaiveBayes:
            os << " variance_floor=" << double_token(s.nb.variance_floor);
            break;
        case Algorithm::RandomForest:
            os << " trees=" << s.rf.trees << " features="
               << (s.rf.features_per_split == FeatureSubset::Sqrt ? "sqrt" : "all")
               << " seed=" << s.rf.seed << " bootstrap=" << (s.rf.bootstrap ? 1 : 0)
               << " min_leaf=" << s.rf.min_leaf;
            break;
        case Algorithm::Smo:
            os << " c=" << double_token(s.smo.c) << " tolerance=" << double_token(s.smo.tolerance)
               << " kernel=" << kernel_key(s.smo.kernel.type)
               << " gamma=" << double_token(s.smo.kernel.gamma)
               << " calibrate=" << (s.smo.calibrate ? 1 : 0);
            break;
    }
    return os.str();
}

ClassifierSpec spec_from_line(const std::string& line) {
    std::istringstream is(line);
    std::string tok;
    ClassifierSpec s;
    bool algo_seen = false;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw IoError("model: malformed spec token: " + tok);
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "algo") {
            auto a = parse_algorithm(val);
            if (!a) throw IoError("model: unknown algorithm: " + val);
            s.algorithm = *a;
            algo_seen = true;
        } else if (key == "k") {
            s.knn.k = std::stoi(val);
        } else if (key == "metric") {
            s.knn.metric =
                val == "manhattan" ? DistanceMetric::Manhattan : DistanceMetric::Euclidean;
        } else if (key == "min_leaf") {
            if (s.algorithm == Algorithm::RandomForest)
                s.rf.min_leaf = std::stoi(val);
            else
                s.c45.min_leaf = std::stoi(val);
        } else if (key == "prune") {
            s.c45.prune = val != "0";
        } else if (key == "variance_floor") {
            s.nb.variance_floor = std::strtod(val.c_str(), nullptr);
        } else if (key == "trees") {
            s.rf.trees = std::stoi(val);
        } else if (key == "features") {
            s.rf.features_per_split = val == "all" ? FeatureSubset::All : FeatureSubset::Sqrt;
        } else if (key == "seed") {
            s.rf.seed = std::stoull(val);
        } else if (key == "bootstrap") {
            s.rf.bootstrap = val != "0";
        } else if (key == "c") {
            s.smo.c = std::strtod(val.c_str(), nullptr);
        } else if (key == "tolerance") {
            s.smo.tolerance = std::strtod(val.c_str(), nullptr);
        } else if (key == "kernel") {
            s.smo.kernel.type = val == "rbf" ? KernelSpec::Type::Rbf : KernelSpec::Type::Linear;
        } else if (key == "gamma") {
            s.smo.kernel.gamma = std::strtod(val.c_str(), nullptr);
        } else if (key == "calibrate") {
            s.smo.calibrate = val != "0";
        } else {
            throw IoError("model: unknown spec key: " + key);
        }
    }
    if (!algo_seen) throw IoError("model: spec line missing algo=");
    return s;
}

void save_model(const Model& model, std::ostream& os) {
    os << "RVOTE1\n";
    os << "spec " << spec_to_line(model.spec()) << "\n";
    os << "dims " << model.dims() << "\n";
    os << "classes " << model.class_count() << "\n";
    for (const auto& name : model.class_names()) os << name << "\n";
    model.save_payload(os);
    if (!os) throw IoError("model: write failed");
}

void save_model(const Model& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for write: " + path.string());
    save_model(model, out);
}

TrainedModel load_model(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "RVOTE1")
        throw IoError("model: bad magic (expected RVOTE1)");
    if (!std::getline(is, line) || line.rfind("spec ", 0) != 0)
        throw IoError("model: missing spec line");
    const ClassifierSpec spec = spec_from_line(line.substr(5));

    detail::expect_token(is, "dims");
    std::size_t dims = 0;
    if (!(is >> dims)) throw IoError("model: bad dims");
    detail::expect_token(is, "classes");
    std::size_t n_classes = 0;
    if (!(is >> n_classes)) throw IoError("model: bad class count");
    is.ignore();  // trailing newline
    std::vector<std::string> names;
    names.reserve(n_classes);
    for (std::size_t i = 0; i < n_classes; ++i) {
        if (!std::getline(is, line)) throw IoError("model: truncated class names");
        names.push_back(line);
    }

    switch (spec.algorithm) {
        case Algorithm::Knn:
            return std::make_unique<detail::KnnModel>(spec, std::move(names), dims, is);
        case Algorithm::C45:
            return std::make_unique<detail::C45Model>(spec, std::move(names), dims, is);
        case Algorithm::NaiveBayes:
            return std::make_unique<detail::NaiveBayesModel>(spec, std::move(names), dims, is);
        case Algorithm::RandomForest:
            return std::make_unique<detail::RandomForestModel>(spec, std::move(names), dims, is);
        case Algorithm::Smo:
            return std::make_unique<detail::SmoModel>(spec, std::move(names), dims, is);
    }
    throw IoError("model: unknown algorithm");
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return load_model(in);
}

CrossValidation cross_validate(const ClassifierSpec& spec, const LabeledDataset& data, int k,
                               std::uint64_t seed) {
    spec.validate();
    data.validate();
    if (k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
    if (static_cast<std::size_t>(k) > data.size())
        throw std::invalid_argument("cross_validate: k exceeds dataset size");

    // Stratified dealing: per class (ascending), a seeded shuffle dealt onto
    // a fold cursor that runs across classes, so fold sizes stay balanced.
    std::vector<std::vector<std::size_t>> fold_test(static_cast<std::size_t>(k));
    std::size_t cursor = 0;
    for (int c = 0; c < data.class_count(); ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.labels[i] == c) idx.push_back(i);
        SplitMix64 rng(mix_seed(seed, 0x5F01DULL + static_cast<std::uint64_t>(c)));
        rng.shuffle(idx);
        for (std::size_t i : idx) fold_test[cursor++ % static_cast<std::size_t>(k)].push_back(i);
    }

    CrossValidation cv;
    cv.fold_accuracies.reserve(static_cast<std::size_t>(k));
    std::vector<char> in_test(data.size());
    for (int f = 0; f < k; ++f) {
        std::fill(in_test.begin(), in_test.end(), 0);
        for (std::size_t i : fold_test[static_cast<std::size_t>(f)]) in_test[i] = 1;

        LabeledDataset train_set;
        train_set.class_names = data.class_names;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (!in_test[i]) {
                train_set.features.push_back(data.features[i]);
                train_set.labels.push_back(data.labels[i]);
            }
        }
        ClassifierSpec fold_spec = spec;
        if (spec.algorithm == Algorithm::RandomForest)
            fold_spec.rf.seed = mix_seed(seed, 0xF07DULL + static_cast<std::uint64_t>(f));

        TrainedModel model = train(fold_spec, train_set);
        std::size_t correct = 0;
        for (std::size_t i : fold_test[static_cast<std::size_t>(f)])
            if (model->predict_label(data.features[i]) == data.labels[i]) ++correct;
        const std::size_t n = fold_test[static_cast<std::size_t>(f)].size();
        cv.fold_accuracies.push_back(n == 0 ? 0.0
                                            : static_cast<double>(correct) /
                                                  static_cast<double>(n));
    }
    double sum = 0.0;
    for (double a : cv.fold_accuracies) sum += a;
    cv.mean_accuracy = sum / static_cast<double>(k);
    return cv;
}

}  // namespace rvote
