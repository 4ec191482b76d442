#pragma once

#include "timeless/tensor.hpp"

#include <random>

namespace timeless::test {

inline COperator pauli_x() {
  COperator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline COperator pauli_y() {
  COperator m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline COperator pauli_z() {
  COperator m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline COperator hadamard() {
  COperator m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

inline CVector plus() { return hadamard().col(0); }

inline COperator projector(const CVector& v) { return v * v.adjoint(); }

inline COperator random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  COperator a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(n(rng), n(rng));
  }
  return 0.5 * (a + a.adjoint());
}

inline CVector random_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(n(rng), n(rng));
  return v.normalized();
}

}  // namespace timeless::test
