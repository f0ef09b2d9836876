#pragma once

#include <stdexcept>
#include <string>

namespace sqhet {

/// A frequency, band or grid precondition was violated.
class BandError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Electronic noise dominates: a background-subtracted band mean is <= 0.
class DegenerateSubtraction : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Experiment configuration failed validation. `path` names the offending
/// field, e.g. "pickoffs[1].squeezer.pump_ratio".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace sqhet
