#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace binpick {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Registration could not build a well-posed rigid alignment.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Scene generation could not place every requested object.
class CapacityError : public Error {
 public:
  CapacityError(std::size_t placed, std::size_t requested)
      : Error("placed only " + std::to_string(placed) + " of " + std::to_string(requested) +
              " objects within the retry budget"),
        placed_(placed) {}

  std::size_t placed() const noexcept { return placed_; }

 private:
  std::size_t placed_;
};

class LocalizationError : public Error {
 public:
  LocalizationError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + " m)"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// No feasible (candidate, joint solution) pair; the caller should re-scan.
class NoGraspError : public Error {
 public:
  using Error::Error;
};

}  // namespace binpick
