#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mesonbell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller supplied an argument outside an operation's domain
/// (negative elapsed time, purity outside [0, 1], unknown inequality index, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A CP-violation parameterization that cannot define the mass eigenstates.
class InvalidParameterization : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Species configuration could not be loaded. Carries the 1-based line of
/// the offending entry (0 when the error is not tied to a line).
class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& message)
        : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace mesonbell
