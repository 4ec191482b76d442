#pragma once

// Dense complex linear algebra shared by every engine.
//
// Composite index order is fixed everywhere as
//   clock (x) system (x) ancilla_1 (x) ancilla_2 (x) ...
// in row-major order: the leftmost factor is the slowest-varying index, so
// entry (i (x) j, k (x) l) of kron(a, b) is a(i, k) * b(j, l) at row
// i * dim(b) + j and column k * dim(b) + l.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace timeless {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using COperator = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest composite dimension kron() will build.
inline constexpr std::size_t kMaxDimension = 8192;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitianError : public std::invalid_argument {
 public:
  NotHermitianError(const std::string& what, Eigen::Index row, Eigen::Index col, double defect)
      : std::invalid_argument(what), row_(row), col_(col), defect_(defect) {}
  Eigen::Index row() const { return row_; }
  Eigen::Index col() const { return col_; }
  double defect() const { return defect_; }

 private:
  Eigen::Index row_;
  Eigen::Index col_;
  double defect_;
};

class NonFiniteError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

COperator identity(Eigen::Index dim);
CVector basis_vector(Eigen::Index dim, Eigen::Index index);

/// Kronecker product a (x) b.  Throws DimensionError past kMaxDimension.
COperator kron(const COperator& a, const COperator& b);
CVector kron(const CVector& a, const CVector& b);

/// Kronecker product of a list of factors, left to right.
COperator kron_all(std::span<const COperator> factors);
CVector kron_all(std::span<const CVector> factors);

/// max_ij |h_ij - conj(h_ji)|
double hermiticity_defect(const COperator& h);

/// Throws NotHermitianError naming the worst entry when the defect exceeds tol.
void require_hermitian(const COperator& h, double tol = 1e-10, const std::string& name = "operator");

void require_finite(const COperator& m, const std::string& name);
void require_finite(const CVector& v, const std::string& name);

double max_abs(const COperator& m);
bool is_unitary(const COperator& u, double tol = 1e-10);

struct HermitianEigen {
  RVector values;  // ascending
  COperator vectors;  // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix (validated to 1e-10).
HermitianEigen hermitian_eigen(const COperator& h);

/// exp(-i t h) for Hermitian h, via eigendecomposition.
COperator expm_hermitian_generator(const COperator& h, double t);

/// Embeds `op`, acting on the factors listed in `targets` (in that order),
/// into the composite space with factor dimensions `dims`.
COperator embed(const COperator& op, std::span<const Eigen::Index> dims,
                std::span<const std::size_t> targets);

Eigen::Index product(std::span<const Eigen::Index> dims);

/// Partial inner product (<a| on factor `which`) (x) 1 applied to a vector.
CVector contract_factor(const CVector& v, std::span<const Eigen::Index> dims, std::size_t which,
                        const CVector& bra);

}  // namespace timeless
