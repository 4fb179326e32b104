#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "starscatter/errors.hpp"

namespace starscatter::linalg {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major. Sizes here are small (a few hundred at
/// most), so the implementation favours clarity and determinism over speed.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0, 0.0)) {}

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> d);
  static ComplexMatrix diagonal(std::span<const double> d);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  static ComplexMatrix column(std::span<const Complex> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  ComplexMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const;
  void set_block(std::size_t row0, std::size_t col0, const ComplexMatrix& b);
  std::vector<Complex> col_vector(std::size_t j) const;
  void set_col(std::size_t j, std::span<const Complex> v);

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex scale);

  double frobenius_norm() const;
  double one_norm() const;  // max column absolute sum
  double max_abs() const;
  bool is_finite() const;

  /// Exact elementwise equality; used by determinism checks.
  bool operator==(const ComplexMatrix& rhs) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);
ComplexMatrix operator*(double scale, ComplexMatrix m);
std::vector<Complex> operator*(const ComplexMatrix& m, std::span<const Complex> v);

ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b);

/// Numerical thresholds threaded through every structural decision.
struct Tolerance {
  double structural_tol = 1e-10;
  double solve_rcond_floor = 1e-12;

  void check() const {
    if (!(structural_tol > 0.0) || !(solve_rcond_floor > 0.0))
      raise(ErrorCode::BadParameter, "tolerances must be strictly positive");
    if (structural_tol < solve_rcond_floor)
      raise(ErrorCode::BadParameter, "structural_tol must be >= solve_rcond_floor");
  }
};

struct EigResult {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // unitary, columns match eigenvalues
};

/// Cyclic Jacobi diagonalisation of a hermitian matrix. Deterministic sweep
/// order, so repeated calls on identical input are bit-identical.
EigResult hermitian_eig(const ComplexMatrix& m, const Tolerance& tol = {});

struct OrthoResult {
  ComplexMatrix q;  // rows() x rank, orthonormal columns spanning the input
  std::size_t rank = 0;
};

/// Modified Gram-Schmidt with one re-orthogonalisation pass. Columns whose
/// residual drops below structural_tol * |B|_F are dropped and reduce rank.
OrthoResult orthonormalize(const ComplexMatrix& b, const Tolerance& tol = {});

struct SolveResult {
  ComplexMatrix x;
  double rcond = 0.0;  // reciprocal 1-norm condition of the system matrix
};

/// LU with partial pivoting. Throws Singular when the reciprocal condition
/// estimate falls below tol.solve_rcond_floor.
SolveResult solve(const ComplexMatrix& m, const ComplexMatrix& rhs, const Tolerance& tol = {});

/// X = B * A^{-1} without forming the inverse explicitly.
SolveResult solve_right(const ComplexMatrix& b, const ComplexMatrix& a, const Tolerance& tol = {});

/// Reciprocal 1-norm condition number; 0 for an exactly singular matrix.
double reciprocal_condition(const ComplexMatrix& m);

struct StructureFlags {
  bool hermitian = false;
  bool skew_hermitian = false;
  bool unitary = false;
};

StructureFlags classify(const ComplexMatrix& m, const Tolerance& tol = {});

}  // namespace starscatter::linalg
