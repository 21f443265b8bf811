#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace leadlag {

/// Bad input data or bad usage. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// CSV/JSON content that cannot be parsed; carries the 1-based line number (0 if unknown).
class ParseError : public InputError {
  public:
    ParseError(const std::string& what, std::size_t line)
        : InputError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Not enough data to carry out the requested computation.
class InsufficientDataError : public InputError {
  public:
    using InputError::InputError;
};

/// Pipeline or numerical failure (non-convergence, undefined statistic). Exit code 1.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace leadlag
