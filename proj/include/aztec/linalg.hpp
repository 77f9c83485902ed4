#pragma once

#include <cstddef>
#include <vector>

#include "aztec/rational.hpp"

namespace aztec {

// Minimal dense matrix over the exact scalar types used here.  Row-major.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  T& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const Matrix&) const = default;

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

// Determinant of an integer matrix by Bareiss fraction-free elimination:
// every intermediate entry stays an exact integer (each elimination step's
// division is exact), which avoids the gcd churn of naive rational pivoting.
// The input is consumed.
BigInt bareiss_determinant(Matrix<BigInt> m);

// Determinant of a rational matrix: each row is scaled to integers by its
// denominator lcm, the integer determinant is computed fraction-free, and the
// scale is divided back out.
Rational determinant(const Matrix<Rational>& m);

}  // namespace aztec
