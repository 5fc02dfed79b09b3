#pragma once

#include <stdexcept>
#include <string>

namespace alphatest {

/// Invalid configuration values (spline order, GARCH coefficients, plans).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row or column counts that do not line up.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The sieve design Z'Z is singular or too badly conditioned to invert.
class SingularDesignError : public std::runtime_error {
public:
    SingularDesignError(const std::string& what, double condition_number)
        : std::runtime_error(what), condition_number_(condition_number) {}
    [[nodiscard]] double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

/// A statistic whose scale estimate is zero or negative.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unalignable input data (CSV ingestion).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File system failures; the message always carries the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace alphatest
