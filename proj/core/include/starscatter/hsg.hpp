#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "starscatter/matrix.hpp"

namespace starscatter::hsg {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::Tolerance;

/// Canonical form matrix J = [[0, I], [-I, 0]] of size 2n x 2n.
ComplexMatrix canonical_j(std::size_t n);

/// diag(I_{n_plus}, -I_{n_minus}).
ComplexMatrix indefinite_identity(std::size_t n_plus, std::size_t n_minus);

/// W = (1/sqrt(2)) [[I, iI], [iI, I]]; conjugation by W block-diagonalises
/// matrices of the form [[A, B], [-B, A]].
ComplexMatrix w_matrix(std::size_t n);

struct Signature {
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  bool canonical() const noexcept { return n_plus == n_minus; }
};

/// A finite-dimensional complex space carrying a nondegenerate skew-hermitian
/// form. The pairing is <phi, psi> = phi^H omega psi, conjugate-linear in the
/// first slot, so <phi, psi> = -conj(<psi, phi>).
class HermitianSymplecticSpace {
 public:
  std::size_t dimension() const noexcept { return omega_.rows(); }
  const ComplexMatrix& omega() const noexcept { return omega_; }
  const Tolerance& tolerance() const noexcept { return tol_; }

 private:
  friend HermitianSymplecticSpace make_space(ComplexMatrix omega, const Tolerance& tol);
  HermitianSymplecticSpace(ComplexMatrix omega, Tolerance tol)
      : omega_(std::move(omega)), tol_(tol) {}

  ComplexMatrix omega_;
  Tolerance tol_;
};

/// Validates skew-hermiticity and nondegeneracy. Matrices whose smallest
/// |eigenvalue of -i*omega| falls within 10x of the structural tolerance are
/// rejected as degenerate rather than regularised.
HermitianSymplecticSpace make_space(ComplexMatrix omega, const Tolerance& tol = {});

/// Subspace of C^m stored as a column-span basis matrix. Operation results may
/// carry an empty basis (the zero subspace).
struct Subspace {
  std::size_t ambient_dim = 0;
  ComplexMatrix basis;  // ambient_dim x k

  std::size_t dim() const noexcept { return basis.cols(); }
};

/// Validating constructor: columns must be linearly independent.
Subspace make_subspace(ComplexMatrix basis, const Tolerance& tol = {});

Complex skew_product(const HermitianSymplecticSpace& space, std::span<const Complex> phi,
                     std::span<const Complex> psi);

/// Counts of positive/negative eigenvalues of -i*omega.
Signature signature(const HermitianSymplecticSpace& space);

/// Nonsingular P with P^H omega P = i*diag(I_{n+}, -I_{n-}).
ComplexMatrix canonical_transform(const HermitianSymplecticSpace& space);

/// Nonsingular Q with Q^H omega Q = J; requires balanced signature.
ComplexMatrix canonical_basis(const HermitianSymplecticSpace& space);

/// Skew-orthogonal complement: all vectors pairing to zero with every element
/// of N. Computed as the euclidean complement of the column span of omega*N.
Subspace skew_complement(const HermitianSymplecticSpace& space, const Subspace& n);

bool is_isotropic(const HermitianSymplecticSpace& space, const Subspace& n);
bool is_lagrange(const HermitianSymplecticSpace& space, const Subspace& n);

struct CanonicalPairs {
  ComplexMatrix p;  // 2n x n, columns p_1..p_n spanning the input plane
  ComplexMatrix q;  // 2n x n, columns q_1..q_n
};

/// Extends a Lagrange plane to a full canonical basis: the Gram matrix of
/// (p_1..p_n, q_1..q_n) under the form equals J.
CanonicalPairs complete_to_canonical_basis(const HermitianSymplecticSpace& space,
                                           const Subspace& plane);

/// g^H J g = J.
bool is_j_unitary(const ComplexMatrix& g, const Tolerance& tol = {});

struct UnitaryPlane {
  ComplexMatrix g;  // 2n x 2n, simultaneously unitary and J-unitary
  Subspace plane;   // Lagrange plane spanned by the first block column of g
};

/// Lagrange plane attached to a unitary U: the column span of
/// [ (U+I)/2 ; (i/2)(U-I) ] inside (C^{2n}, J).
UnitaryPlane plane_from_unitary(const ComplexMatrix& u, const Tolerance& tol = {});

/// Inverse map on the J-space: for a plane with stacked basis [X; Y],
/// U = (X - iY)(X + iY)^{-1}. Independent of the choice of basis.
ComplexMatrix plane_to_unitary(const Subspace& plane, const Tolerance& tol = {});

}  // namespace starscatter::hsg
