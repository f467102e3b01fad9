#pragma once

#include <stdexcept>
#include <string>

namespace fepool {

/// Broad error categories; the CLI maps them onto exit codes.
enum class ErrorKind { Config, Data, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Invalid configuration or arguments (bad window sizes, k out of range, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(ErrorKind::Config, message) {}
};

/// Problems with the input data itself (missing file, non-numeric cell, too short).
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(ErrorKind::Data, message) {}
};

/// Numerical failures (degenerate fits, non-finite objectives).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& message) : Error(ErrorKind::Numeric, message) {}
};

} // namespace fepool
