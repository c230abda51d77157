#pragma once

#include <stdexcept>
#include <string>

namespace leanlab {

/// Bad or inconsistent input data (malformed files, unknown values, missing ids).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Misconfiguration: field mappings, hyperparameters, incompatible options.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure during training (non-finite loss and the like).
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace leanlab
