#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latred {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (sqrt of a
/// negative number, ln Gamma at a non-positive point, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The basis rows are linearly dependent where full rank is required.
class SingularBasisError : public Error {
 public:
  using Error::Error;
};

/// The working precision cannot support the requested computation. `index`
/// names the failing basis vector (0-based).
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Internal invariant violated; indicates a bug or corrupted input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Malformed matrix text with 1-based line/column of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace latred
