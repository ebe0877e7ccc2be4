#pragma once

#include <stdexcept>
#include <string>

namespace rggm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(int pivot)
      : Error("matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
        pivot_(pivot) {}
  /// Zero-based column where the Cholesky recursion broke down.
  int pivot() const noexcept { return pivot_; }

 private:
  int pivot_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("dataset has no observations") {}
};

class NonPositiveDiagonal : public Error {
 public:
  explicit NonPositiveDiagonal(int index)
      : Error("input matrix has a non-positive diagonal entry at " + std::to_string(index)),
        index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

class DegenerateScatter : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class DegenerateColumn : public Error {
 public:
  explicit DegenerateColumn(int column)
      : Error("column " + std::to_string(column) + " has zero scale or too few distinct values"),
        column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

class SupportCollision : public Error {
 public:
  using Error::Error;
};

class EmptyTruth : public Error {
 public:
  EmptyTruth() : Error("ground-truth edge set is empty") {}
};

/// Malformed user input (CSV, JSON artifacts, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace rggm
