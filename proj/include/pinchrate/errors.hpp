#pragma once

#include <stdexcept>
#include <string>

namespace pinchrate {

/// Argument outside the mathematical domain of a kernel (non-finite, negative, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Pinching-antenna index outside [1, M].
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Invalid physical or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature hit its subdivision limit. Carries the best estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double abs_error)
      : std::runtime_error(what), best_estimate_(best_estimate), abs_error_(abs_error) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double abs_error() const noexcept { return abs_error_; }

 private:
  double best_estimate_;
  double abs_error_;
};

/// Malformed configuration document; `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pinchrate
