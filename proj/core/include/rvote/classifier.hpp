#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rvote {

struct LabeledDataset {
    std::vector<std::vector<double>> features;  // N x D
    std::vector<int> labels;                    // class indices in [0, C)
    std::vector<std::string> class_names;       // size C

    std::size_t size() const { return features.size(); }
    std::size_t dims() const { return features.empty() ? 0 : features.front().size(); }
    int class_count() const { return static_cast<int>(class_names.size()); }
    void validate() const;
};

using ProbDist = std::vector<double>;

// argmax with lowest-index tie-break; the single label rule used everywhere.
int argmax_lowest(std::span<const double>);

enum class Algorithm { Knn, C45, NaiveBayes, RandomForest, Smo };

enum class DistanceMetric { Euclidean, Manhattan };

struct KnnParams {
    int k = 5;
    DistanceMetric metric = DistanceMetric::Euclidean;
};

struct C45Params {
    int min_leaf = 2;
    bool prune = false;  // pessimistic error pruning when set
};

struct NbParams {
    double variance_floor = 1e-9;
};

enum class FeatureSubset { Sqrt, All };

struct RfParams {
    int trees = 100;
    FeatureSubset features_per_split = FeatureSubset::Sqrt;
    std::uint64_t seed = 0;
    bool bootstrap = true;  // test hook: disabled -> each tree sees the full data
    int min_leaf = 1;
};

struct KernelSpec {
    enum class Type { Linear, Rbf } type = Type::Linear;
    double gamma = 1.0;  // rbf only

    double operator()(std::span<const double> a, std::span<const double> b) const;
};

struct SmoParams {
    double c = 1.0;
    double tolerance = 1e-3;
    KernelSpec kernel;
    bool calibrate = true;  // Platt sigmoids + pairwise coupling
};

struct ClassifierSpec {
    Algorithm algorithm = Algorithm::Knn;
    KnnParams knn;
    C45Params c45;
    NbParams nb;
    RfParams rf;
    SmoParams smo;

    // Table name: "5NN" (or "<k>NN"), "J48", "NB", "RF", "SMO".
    std::string name() const;
    void validate() const;

    static ClassifierSpec make_knn(int k = 5);
    static ClassifierSpec make_c45();
    static ClassifierSpec make_nb();
    static ClassifierSpec make_rf(int trees = 100, std::uint64_t seed = 0);
    static ClassifierSpec make_smo(double c = 1.0);
};

// All five defaults in canonical report order.
std::vector<ClassifierSpec> default_classifiers(std::uint64_t seed = 0);
std::optional<Algorithm> parse_algorithm(std::string_view);
const char* algorithm_key(Algorithm);  // "knn", "c45", "nb", "rf", "smo"

class Model {
public:
    virtual ~Model() = default;

    virtual ProbDist predict_proba(std::span<const double> x) const = 0;
    int predict_label(std::span<const double> x) const;

    int class_count() const { return static_cast<int>(class_names_.size()); }
    const std::vector<std::string>& class_names() const { return class_names_; }
    std::size_t dims() const { return dims_; }
    const ClassifierSpec& spec() const { return spec_; }

    virtual void save_payload(std::ostream&) const = 0;

protected:
    void check_input(std::span<const double> x) const;

    ClassifierSpec spec_;
    std::vector<std::string> class_names_;
    std::size_t dims_ = 0;
};

using TrainedModel = std::unique_ptr<Model>;

TrainedModel train(const ClassifierSpec&, const LabeledDataset&);

// Versioned model files: "RVOTE1" magic, spec echo, class names, then the
// algorithm payload. Doubles are stored as hexfloats so a round trip is
// prediction-identical.
void save_model(const Model&, std::ostream&);
void save_model(const Model&, const std::filesystem::path&);
TrainedModel load_model(std::istream&);
TrainedModel load_model(const std::filesystem::path&);

std::string spec_to_line(const ClassifierSpec&);
ClassifierSpec spec_from_line(const std::string&);

struct CrossValidation {
    double mean_accuracy = 0.0;
    std::vector<double> fold_accuracies;
};

// Stratified k-fold: per class, a seeded shuffle dealt round-robin over the
// folds. Per-fold model seeds derive from `seed` and the fold index.
CrossValidation cross_validate(const ClassifierSpec&, const LabeledDataset&, int k,
                               std::uint64_t seed);

}  // namespace rvote
