#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latent {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed serialized input (graph JSON, spec JSON, matrix JSON).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Argument violates a documented precondition (dimension, range, distribution).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Matrix failed the Laplacian class conditions.
class LaplacianError : public Error {
 public:
  LaplacianError(const std::string& what, std::size_t row, std::size_t col)
      : Error(what), row_(row), col_(col) {}

  // 0-based position of the first violation; col == row for a row-sum failure.
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

// Forest enumeration refused because the graph exceeds the vertex cap.
class EnumerationCapError : public Error {
 public:
  EnumerationCapError(const std::string& what, std::size_t cap) : Error(what), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

// Inversion failure, degenerate basis assembly, exponential overflow.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An algebraic precondition (AC = A, C^2 = C, ...) does not hold numerically.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace latent
