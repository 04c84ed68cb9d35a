#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfmargin {

/// Base class for every recoverable error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input row. `line()` is 1-based and counts the header row if present.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Constant series: variance, skewness, autocorrelations are undefined.
class ZeroVarianceError : public Error {
public:
    using Error::Error;
};

/// Estimator produced an infeasible value (e.g. non-positive WLS intercept).
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Requested quantile lies outside the range an estimator can resolve
/// (EVT inside the threshold, historical beyond the sample).
class UnavailableError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace hfmargin
