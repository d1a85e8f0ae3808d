#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oversmooth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (edge lists, feature CSV, configs).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  /// 1-based line number, or 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

/// A value outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition (shape, symmetry, orthonormality).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A feature column vanished under centering or normalization.
class DegenerateColumnError : public DomainError {
 public:
  DegenerateColumnError(std::size_t column, const std::string& what)
      : DomainError("degenerate column " + std::to_string(column) + ": " + what),
        column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// An iterative solver hit its sweep cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A proposition check was asked to run outside its hypotheses.
class SetupError : public Error {
 public:
  using Error::Error;
};

}  // namespace oversmooth
