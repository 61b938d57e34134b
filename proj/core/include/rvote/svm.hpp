#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "rvote/classifier.hpp"

namespace rvote {

// One maximum-margin separator fit by sequential minimal optimization.
// decision(x) = sum_i alpha_i y_i K(x_i, x) + bias.
struct BinarySvm {
    std::vector<std::vector<double>> points;
    std::vector<int> labels;  // -1 / +1
    std::vector<double> alphas;
    double bias = 0.0;
    KernelSpec kernel;

    double decision(std::span<const double> x) const;

    void save(std::ostream&) const;
    static BinarySvm load(std::istream&);
};

struct SmoOptions {
    double c = 1.0;
    double tolerance = 1e-3;
    KernelSpec kernel;
    int max_epochs = 2000;  // full scans; KKT convergence normally ends far earlier
    // Called with the dual objective after every successful two-alpha step
    // (monotone ascent; test hook).
    std::function<void(double)> objective_observer;
};

// Working pair selection is deterministic: first KKT violator in index
// order, second choice maximizing |E1 - E2| with an in-order fallback scan.
BinarySvm solve_binary_svm(std::span<const std::vector<double>> points,
                           std::span<const int> labels, const SmoOptions& opts);

// Platt sigmoid p(y=1|f) = 1 / (1 + exp(a*f + b)), fit by the standard
// regularized Newton iteration on the training decision values.
struct PlattSigmoid {
    double a = 0.0;
    double b = 0.0;
    double operator()(double f) const;
};

PlattSigmoid fit_platt(std::span<const double> decisions, std::span<const int> targets);

}  // namespace rvote
