#include "aztec/linalg.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>

namespace aztec {

BigInt bareiss_determinant(Matrix<BigInt> m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  const size_t n = m.rows();
  if (n == 0) return 1;

  int sign = 1;
  BigInt prev = 1;  // pivot of the previous round; divides every new entry exactly
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      size_t swap_row = k + 1;
      while (swap_row < n && m(swap_row, k) == 0) ++swap_row;
      if (swap_row == n) return 0;
      for (size_t j = k; j < n; ++j) std::swap(m(k, j), m(swap_row, j));
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j) {
        BigInt num = m(k, k) * m(i, j) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : BigInt(-m(n - 1, n - 1));
}

Rational determinant(const Matrix<Rational>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  const size_t n = m.rows();
  if (n == 0) return 1;

  Matrix<BigInt> scaled(n, n);
  BigInt scale = 1;  // product of row lcms; det(m) = det(scaled) / scale
  for (size_t i = 0; i < n; ++i) {
    BigInt row_lcm = 1;
    for (size_t j = 0; j < n; ++j)
      mpz_lcm(row_lcm.get_mpz_t(), row_lcm.get_mpz_t(), m(i, j).get_den_mpz_t());
    for (size_t j = 0; j < n; ++j) {
      BigInt q = row_lcm / m(i, j).get_den();
      scaled(i, j) = m(i, j).get_num() * q;
    }
    scale *= row_lcm;
  }
  return rat(bareiss_determinant(std::move(scaled)), scale);
}

}  // namespace aztec
