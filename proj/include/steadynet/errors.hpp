#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace steadynet {

/// Precondition violated by a caller-supplied argument.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Non-finite state produced during time integration.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite gradient or loss inside an optimizer step.
struct OptimizerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Metric requested on labels that do not contain both classes.
struct UndefinedMetricError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Invalid experiment configuration. `path` is a JSON-pointer-like location.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& msg)
        : std::runtime_error(path + ": " + msg), path_(path) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace steadynet
