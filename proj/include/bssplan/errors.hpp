#pragma once

#include <stdexcept>
#include <string>

namespace bssplan {

/// Bad or inconsistent input data (network, catalog, scenarios). CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad run configuration or argument value. CLI exit code 3.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The LP could not be solved to optimality. CLI exit code 1.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bssplan
