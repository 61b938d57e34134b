#pragma once

// Concrete model types, internal to the library. Construction goes through
// train() / load_model().

#include <iosfwd>
#include <vector>

#include "rvote/classifier.hpp"
#include "rvote/svm.hpp"
#include "rvote/tree.hpp"

namespace rvote::detail {

// Hexfloat tokens: exact double round trip in text form.
void write_double(std::ostream&, double);
double read_double(std::istream&);
void expect_token(std::istream&, const char* token);

class KnnModel final : public Model {
public:
    KnnModel(const ClassifierSpec&, const LabeledDataset&);
    KnnModel(const ClassifierSpec&, std::vector<std::string> class_names, std::size_t dims,
             std::istream& payload);

    ProbDist predict_proba(std::span<const double> x) const override;
    void save_payload(std::ostream&) const override;

private:
    std::vector<std::vector<double>> train_x_;
    std::vector<int> train_y_;
};

class NaiveBayesModel final : public Model {
public:
    NaiveBayesModel(const ClassifierSpec&, const LabeledDataset&);
    NaiveBayesModel(const ClassifierSpec&, std::vector<std::string> class_names, std::size_t dims,
                    std::istream& payload);

    ProbDist predict_proba(std::span<const double> x) const override;
    void save_payload(std::ostream&) const override;

    // Exposed for oracle tests.
    const std::vector<std::vector<double>>& means() const { return means_; }
    const std::vector<std::vector<double>>& variances() const { return variances_; }
    const std::vector<double>& log_priors() const { return log_priors_; }

private:
    std::vector<std::vector<double>> means_;      // C x D
    std::vector<std::vector<double>> variances_;  // C x D, floored
    std::vector<double> log_priors_;              // C; -inf marks absent classes
};

class C45Model final : public Model {
public:
    C45Model(const ClassifierSpec&, const LabeledDataset&);
    C45Model(const ClassifierSpec&, std::vector<std::string> class_names, std::size_t dims,
             std::istream& payload);

    ProbDist predict_proba(std::span<const double> x) const override;
    void save_payload(std::ostream&) const override;

    const DecisionTree& tree() const { return tree_; }

private:
    DecisionTree tree_;
};

class RandomForestModel final : public Model {
public:
    RandomForestModel(const ClassifierSpec&, const LabeledDataset&);
    RandomForestModel(const ClassifierSpec&, std::vector<std::string> class_names,
                      std::size_t dims, std::istream& payload);

    ProbDist predict_proba(std::span<const double> x) const override;
    void save_payload(std::ostream&) const override;

    const std::vector<DecisionTree>& trees() const { return trees_; }

private:
    std::vector<DecisionTree> trees_;
};

class SmoModel final : public Model {
public:
    SmoModel(const ClassifierSpec&, const LabeledDataset&);
    SmoModel(const ClassifierSpec&, std::vector<std::string> class_names, std::size_t dims,
             std::istream& payload);

    ProbDist predict_proba(std::span<const double> x) const override;
    void save_payload(std::ostream&) const override;

private:
    struct Pair {
        int class_a = 0;  // decision > 0 side
        int class_b = 0;
        BinarySvm svm;
        PlattSigmoid sigmoid;  // valid when calibrate
    };
    std::vector<Pair> pairs_;
};

}  // namespace rvote::detail
