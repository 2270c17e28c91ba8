#pragma once

#include <stdexcept>
#include <string>

namespace epiwarn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (names the offending field where possible).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Input on which a statistic is undefined (constant series, zero mean, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Rejection sampling of the transmission schedule ran out of attempts.
class CalibrationInfeasibleError : public Error {
public:
    using Error::Error;
};

/// The SDE integrator produced a non-finite state.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double failure_time)
        : Error(what), failure_time_(failure_time) {}
    double failure_time() const noexcept { return failure_time_; }

private:
    double failure_time_;
};

class SliceError : public Error {
public:
    using Error::Error;
};

/// Not enough windows / rows to satisfy a requested count.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Data that parses but is internally inconsistent (e.g. negative prevalence).
class DataConsistencyError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

}  // namespace epiwarn
