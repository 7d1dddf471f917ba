#pragma once

#include <stdexcept>
#include <string>

namespace mcpflow {

// Bad caller input: out-of-range labels, mismatched dimensions, bad config.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input files that parse but disagree with each other (catalog hash, dims).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the ADMM loop when the objective stops being finite.
class SolverError : public NumericError {
public:
    SolverError(const std::string& what, long iteration)
        : NumericError(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::string path)
        : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace mcpflow
