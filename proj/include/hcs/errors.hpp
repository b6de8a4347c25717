#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hcs {

/// Input outside the mathematical domain of an operation (negative density, k <= 0, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Evaluation at a pole of a formula (matching degree with gdp == L_index, ...).
class SingularityError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// A keyed lookup failed, e.g. a research-series year that is not present.
class LookupError : public std::out_of_range {
  public:
    LookupError(const std::string &what, int year) : std::out_of_range{what}, year_{year} {}

    int year() const noexcept { return year_; }

  private:
    int year_;
};

/// A feasibility constraint of the allocation program cannot be honoured.
class ConstraintError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A computation would exceed a configured size guard.
class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values appeared during an iterative computation.
class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string &what, std::vector<double> offending)
        : std::runtime_error{what}, offending_{std::move(offending)} {}

    const std::vector<double> &offending() const noexcept { return offending_; }

  private:
    std::vector<double> offending_;
};

/// Malformed input document.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ValidationIssue {
    std::string path;
    std::string message;
};

/// One or more invariant violations, each tagged with its field path.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(std::vector<ValidationIssue> issues);
    ValidationError(std::string path, std::string message)
        : ValidationError{std::vector<ValidationIssue>{{std::move(path), std::move(message)}}} {}

    const std::vector<ValidationIssue> &issues() const noexcept { return issues_; }

  private:
    std::vector<ValidationIssue> issues_;
};

/// File-system failures, always carrying the offending path.
class IoError : public std::runtime_error {
  public:
    IoError(const std::string &what, std::string path)
        : std::runtime_error{what + ": " + path}, path_{std::move(path)} {}

    const std::string &path() const noexcept { return path_; }

  private:
    std::string path_;
};

} // namespace hcs
