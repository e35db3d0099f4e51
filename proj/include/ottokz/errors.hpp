#pragma once

#include <stdexcept>
#include <string>

namespace ottokz {

/// Invalid or incomplete run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside a stroke or a cycle (CLI exit code 3).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scaling fit could not be performed on the supplied data (CLI exit code 4).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ottokz
