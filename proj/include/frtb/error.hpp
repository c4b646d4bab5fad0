#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace frtb {

/// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `location` is "line L, column C" or "row N".
class ParseError : public Error {
public:
    ParseError(std::string location, const std::string& message)
        : Error(location + ": " + message), location_(std::move(location)) {}

    const std::string& location() const { return location_; }

private:
    std::string location_;
};

/// A rulebook (or other document) that parsed but breaks one or more invariants.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Well-formed input that cannot be processed: missing market data, unknown bucket, ...
class InputError : public Error {
public:
    using Error::Error;
};

} // namespace frtb
