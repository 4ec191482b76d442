#include "timeless/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace timeless {

COperator identity(Eigen::Index dim) { return COperator::Identity(dim, dim); }

CVector basis_vector(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) {
    throw DimensionError("basis_vector: index " + std::to_string(index) + " outside dimension " +
                         std::to_string(dim));
  }
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

namespace {

void check_product_dimension(Eigen::Index a, Eigen::Index b) {
  if (a <= 0 || b <= 0) throw DimensionError("kron: empty factor");
  const auto total = static_cast<std::size_t>(a) * static_cast<std::size_t>(b);
  if (total > kMaxDimension) {
    std::ostringstream msg;
    msg << "kron: composite dimension " << a << " x " << b << " = " << total << " exceeds maximum "
        << kMaxDimension;
    throw DimensionError(msg.str());
  }
}

}  // namespace

COperator kron(const COperator& a, const COperator& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) throw DimensionError("kron: operands must be square");
  check_product_dimension(a.rows(), b.rows());
  const Eigen::Index n = b.rows();
  COperator out(a.rows() * n, a.cols() * n);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      out.block(i * n, k * n, n, n) = a(i, k) * b;
    }
  }
  return out;
}

CVector kron(const CVector& a, const CVector& b) {
  check_product_dimension(a.size(), b.size());
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

COperator kron_all(std::span<const COperator> factors) {
  if (factors.empty()) throw DimensionError("kron_all: no factors");
  COperator out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

CVector kron_all(std::span<const CVector> factors) {
  if (factors.empty()) throw DimensionError("kron_all: no factors");
  CVector out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

double hermiticity_defect(const COperator& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const COperator& h, double tol, const std::string& name) {
  if (h.rows() != h.cols()) throw DimensionError(name + ": not square");
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  const double defect = (h - h.adjoint()).cwiseAbs().maxCoeff(&row, &col);
  if (defect > tol) {
    std::ostringstream msg;
    msg << name << " is not Hermitian: |h(" << row << "," << col << ") - conj(h(" << col << "," << row
        << "))| = " << defect << " > " << tol;
    throw NotHermitianError(msg.str(), row, col, defect);
  }
}

void require_finite(const COperator& m, const std::string& name) {
  if (!m.allFinite()) throw NonFiniteError(name + " has non-finite entries");
}

void require_finite(const CVector& v, const std::string& name) {
  if (!v.allFinite()) throw NonFiniteError(name + " has non-finite entries");
}

double max_abs(const COperator& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_unitary(const COperator& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - identity(u.rows())) < tol;
}

HermitianEigen hermitian_eigen(const COperator& h) {
  require_hermitian(h);
  // Symmetrize so rounding in the input does not leak into the solver.
  const COperator sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<COperator> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eigen: solver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

COperator expm_hermitian_generator(const COperator& h, double t) {
  const auto eig = hermitian_eigen(h);
  CVector phases(eig.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(-kI * t * eig.values(i));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Eigen::Index product(std::span<const Eigen::Index> dims) {
  Eigen::Index p = 1;
  for (auto d : dims) p *= d;
  return p;
}

COperator embed(const COperator& op, std::span<const Eigen::Index> dims,
                std::span<const std::size_t> targets) {
  const Eigen::Index total = product(dims);
  Eigen::Index sub = 1;
  for (auto t : targets) {
    if (t >= dims.size()) throw DimensionError("embed: target factor out of range");
    sub *= dims[t];
  }
  if (op.rows() != sub || op.cols() != sub) throw DimensionError("embed: operator does not match target factors");

  // strides[k]: row-major stride of factor k
  std::vector<Eigen::Index> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];

  auto split = [&](Eigen::Index index, std::vector<Eigen::Index>& digits) {
    for (std::size_t k = 0; k < dims.size(); ++k) digits[k] = (index / strides[k]) % dims[k];
  };
  auto sub_index = [&](const std::vector<Eigen::Index>& digits) {
    Eigen::Index s = 0;
    for (auto t : targets) s = s * dims[t] + digits[t];
    return s;
  };

  COperator out = COperator::Zero(total, total);
  std::vector<Eigen::Index> row_digits(dims.size());
  std::vector<Eigen::Index> col_digits(dims.size());
  for (Eigen::Index col = 0; col < total; ++col) {
    split(col, col_digits);
    const Eigen::Index sc = sub_index(col_digits);
    // Rows differ from col only on target factors.
    for (Eigen::Index sr = 0; sr < sub; ++sr) {
      const Complex value = op(sr, sc);
      if (value == Complex{}) continue;
      row_digits = col_digits;
      Eigen::Index rem = sr;
      for (std::size_t k = targets.size(); k-- > 0;) {
        row_digits[targets[k]] = rem % dims[targets[k]];
        rem /= dims[targets[k]];
      }
      Eigen::Index row = 0;
      for (std::size_t k = 0; k < dims.size(); ++k) row += row_digits[k] * strides[k];
      out(row, col) = value;
    }
  }
  return out;
}

CVector contract_factor(const CVector& v, std::span<const Eigen::Index> dims, std::size_t which,
                        const CVector& bra) {
  if (which >= dims.size()) throw DimensionError("contract_factor: factor out of range");
  if (v.size() != product(dims)) throw DimensionError("contract_factor: vector does not match dims");
  if (bra.size() != dims[which]) throw DimensionError("contract_factor: bra does not match factor");
  Eigen::Index outer = 1;
  for (std::size_t k = 0; k < which; ++k) outer *= dims[k];
  Eigen::Index inner = 1;
  for (std::size_t k = which + 1; k < dims.size(); ++k) inner *= dims[k];
  const Eigen::Index mid = dims[which];
  CVector out = CVector::Zero(outer * inner);
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index m = 0; m < mid; ++m) {
      const Complex c = std::conj(bra(m));
      if (c == Complex{}) continue;
      out.segment(o * inner, inner) += c * v.segment((o * mid + m) * inner, inner);
    }
  }
  return out;
}

}  // namespace timeless
