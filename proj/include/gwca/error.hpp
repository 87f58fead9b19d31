#pragma once

#include <stdexcept>
#include <string>

namespace gwca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adjacency or feature matrix violates the graph invariants.
class InvalidGraph : public Error {
public:
    using Error::Error;
};

/// Operand shapes do not agree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, arguments or input files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The correlation eigenproblem could not be solved.
class SolverError : public Error {
public:
    SolverError(const std::string& view, const std::string& what)
        : Error(view + ": " + what), view_(view) {}

    const std::string& view() const noexcept { return view_; }

private:
    std::string view_;
};

}  // namespace gwca
