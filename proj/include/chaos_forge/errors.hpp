#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chaos_forge {

/// Argument outside the mathematical domain of an operation (ν ≤ −1, a ≤ 0, H ∉ (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Index or order out of range, e.g. a contraction order r > min(k, j).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Polynomial or chaos degree would exceed the configured cap.
class DegreeCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Input is not normalized as required (E F = 0, E F² = 1, Σσ² = 1, ...).
class NormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Quadrature, series or eigensolver did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal identity that must hold exactly (up to rounding) failed.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Config text could not be parsed; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A config value is outside its documented range; carries the offending key.
class ConfigRangeError : public std::runtime_error {
 public:
  ConfigRangeError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace chaos_forge
