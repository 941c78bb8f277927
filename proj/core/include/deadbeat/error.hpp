#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace deadbeat {

/// Failure categories raised by the library. Each maps onto one documented
/// error of an operation; the CLI maps them onto process exit codes.
enum class ErrorKind {
  kInvalidArgument,     // bad grid, wrong sizes, malformed configuration
  kDimensionMismatch,
  kLengthMismatch,
  kNonFiniteState,      // NaN/Inf produced during integration
  kNotPositiveDefinite, // Cholesky pivot under the floor
  kDomainViolation,     // state/input outside the declared sets
  kDomainExit,          // simulated plant left the open set O
  kWrongOutputDimension,
  kKappaVanished,
  kGramDegenerate,      // observer reset failed and policy is Fail
  kInvalidParams,
  kHypothesisFails,
  kSingularDenominator,
  kNonNegativeZ2,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> index = std::nullopt,
        std::optional<double> value = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        index_(index),
        value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Grid node at which the failure was detected, when meaningful.
  std::optional<std::size_t> index() const noexcept { return index_; }
  /// Numeric detail (e.g. the offending pivot).
  std::optional<double> value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
  std::optional<double> value_;
};

}  // namespace deadbeat
