#pragma once

#include <stdexcept>
#include <string>

namespace rvote {

// Contract violations (bad arguments, dimension mismatches) throw
// std::invalid_argument directly. The types below cover failures that
// callers are expected to distinguish.

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DecodeError : IoError {
    using IoError::IoError;
};

// Corpus root missing, fewer than two classes, or a class with no
// decodable images.
struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SMO asked to fit a dataset with fewer than two classes present.
struct DegenerateModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Soft voting requested on groups that carry no probability distributions.
struct UnsupportedSchemeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Holdout split impossible (a class with fewer than two samples).
struct InvalidSplitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rvote
