#include "starscatter/hsg.hpp"
#include <numeric>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace starscatter::hsg {

namespace {

const Complex kI(0.0, 1.0);

void require_vector_length(std::span<const Complex> v, std::size_t m, const char* name) {
  if (v.size() != m) {
    std::ostringstream os;
    os << name << ": expected length " << m << ", got " << v.size();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
}

void require_in_space(const HermitianSymplecticSpace& space, const Subspace& n, const char* op) {
  if (n.ambient_dim != space.dimension() || n.basis.rows() != space.dimension()) {
    std::ostringstream os;
    os << op << ": subspace lives in dimension " << n.ambient_dim << ", space has "
       << space.dimension();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
}

/// Orthonormal columns spanning the range of a (near-)projector. Projector
/// eigenvalues are 0 or 1, so a fixed loose threshold separates them cleanly.
ComplexMatrix projector_range(const ComplexMatrix& projector) {
  Tolerance loose;
  loose.structural_tol = 1e-8;
  return linalg::orthonormalize(projector, loose).q;
}

/// Orthonormal basis of the euclidean complement of span(q) inside C^m;
/// q must have orthonormal columns.
ComplexMatrix euclidean_complement(const ComplexMatrix& q, std::size_t m) {
  ComplexMatrix residual = ComplexMatrix::identity(m);
  if (q.cols() > 0) residual -= q * q.adjoint();
  return projector_range(residual);
}

}  // namespace

ComplexMatrix canonical_j(std::size_t n) {
  ComplexMatrix j(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    j(i, n + i) = 1.0;
    j(n + i, i) = -1.0;
  }
  return j;
}

ComplexMatrix indefinite_identity(std::size_t n_plus, std::size_t n_minus) {
  ComplexMatrix m(n_plus + n_minus, n_plus + n_minus);
  for (std::size_t i = 0; i < n_plus; ++i) m(i, i) = 1.0;
  for (std::size_t i = 0; i < n_minus; ++i) m(n_plus + i, n_plus + i) = -1.0;
  return m;
}

ComplexMatrix w_matrix(std::size_t n) {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix w(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    w(i, i) = r;
    w(i, n + i) = Complex(0.0, r);
    w(n + i, i) = Complex(0.0, r);
    w(n + i, n + i) = r;
  }
  return w;
}

HermitianSymplecticSpace make_space(ComplexMatrix omega, const Tolerance& tol) {
  tol.check();
  if (!omega.square()) raise(ErrorCode::DimensionMismatch, "make_space: omega must be square");
  if (!omega.is_finite()) raise(ErrorCode::BadParameter, "make_space: non-finite entries");

  const double norm = omega.frobenius_norm();
  const double skew_defect = (omega + omega.adjoint()).frobenius_norm();
  if (skew_defect > tol.structural_tol * std::max(1.0, norm)) {
    std::ostringstream os;
    os << "make_space: |omega + omega^H| = " << skew_defect << " (omega must be skew-hermitian)";
    raise(ErrorCode::NotSkewHermitian, os.str());
  }

  // -i*omega is hermitian; nondegeneracy = no eigenvalue near zero. Forms
  // within 10x of the structural tolerance are rejected, not regularised.
  const linalg::EigResult eig = linalg::hermitian_eig(Complex(0.0, -1.0) * omega, tol);
  double min_abs = std::numeric_limits<double>::infinity();
  std::size_t min_idx = 0;
  for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i) {
    const double a = std::abs(eig.eigenvalues[i]);
    if (a < min_abs) {
      min_abs = a;
      min_idx = i;
    }
  }
  if (!(min_abs > 10.0 * tol.structural_tol * norm)) {
    std::ostringstream os;
    os << "make_space: form is degenerate or nearly so (|lambda_min| = " << min_abs
       << ", near-null direction is eigenvector " << min_idx << " of -i*omega)";
    raise(ErrorCode::Degenerate, os.str());
  }
  return HermitianSymplecticSpace(std::move(omega), tol);
}

Subspace make_subspace(ComplexMatrix basis, const Tolerance& tol) {
  tol.check();
  if (!basis.is_finite()) raise(ErrorCode::BadParameter, "make_subspace: non-finite entries");
  if (basis.cols() == 0 || basis.cols() > basis.rows())
    raise(ErrorCode::DimensionMismatch, "make_subspace: need 1 <= k <= m columns");
  const linalg::OrthoResult ortho = linalg::orthonormalize(basis, tol);
  if (ortho.rank != basis.cols())
    raise(ErrorCode::BadParameter, "make_subspace: columns are linearly dependent");
  return Subspace{basis.rows(), std::move(basis)};
}

Complex skew_product(const HermitianSymplecticSpace& space, std::span<const Complex> phi,
                     std::span<const Complex> psi) {
  const std::size_t m = space.dimension();
  require_vector_length(phi, m, "skew_product: phi");
  require_vector_length(psi, m, "skew_product: psi");
  const std::vector<Complex> omega_psi = space.omega() * psi;
  Complex out(0.0, 0.0);
  for (std::size_t i = 0; i < m; ++i) out += std::conj(phi[i]) * omega_psi[i];
  return out;
}

Signature signature(const HermitianSymplecticSpace& space) {
  const linalg::EigResult eig =
      linalg::hermitian_eig(Complex(0.0, -1.0) * space.omega(), space.tolerance());
  Signature sig;
  for (double lambda : eig.eigenvalues) {
    if (lambda > 0.0)
      ++sig.n_plus;
    else
      ++sig.n_minus;
  }
  return sig;
}

ComplexMatrix canonical_transform(const HermitianSymplecticSpace& space) {
  const std::size_t m = space.dimension();
  const linalg::EigResult eig =
      linalg::hermitian_eig(Complex(0.0, -1.0) * space.omega(), space.tolerance());

  // Columns scaled by |lambda|^{-1/2}; positive eigenvalues first so that
  // P^H omega P lands exactly on i*diag(I, -I). Stable sort keeps tied
  // eigenvalues in their natural order (diagonal input gives P = I).
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&eig](std::size_t a, std::size_t b) {
    return eig.eigenvalues[a] > eig.eigenvalues[b];
  });

  ComplexMatrix p(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t src = order[j];
    const double scale = 1.0 / std::sqrt(std::abs(eig.eigenvalues[src]));
    for (std::size_t i = 0; i < m; ++i) p(i, j) = eig.eigenvectors(i, src) * scale;
  }
  return p;
}

ComplexMatrix canonical_basis(const HermitianSymplecticSpace& space) {
  const Signature sig = signature(space);
  if (!sig.canonical()) {
    std::ostringstream os;
    os << "canonical_basis: signature (" << sig.n_plus << ", " << sig.n_minus
       << ") admits no canonical basis";
    raise(ErrorCode::NotCanonical, os.str());
  }
  // Conjugating i*diag(I, -I) by W^H produces J, so Q = P * W^H.
  return canonical_transform(space) * w_matrix(sig.n_plus).adjoint();
}

Subspace skew_complement(const HermitianSymplecticSpace& space, const Subspace& n) {
  require_in_space(space, n, "skew_complement");
  const Tolerance& tol = space.tolerance();
  const linalg::OrthoResult image = linalg::orthonormalize(space.omega() * n.basis, tol);
  return Subspace{space.dimension(), euclidean_complement(image.q, space.dimension())};
}

bool is_isotropic(const HermitianSymplecticSpace& space, const Subspace& n) {
  require_in_space(space, n, "is_isotropic");
  const Tolerance& tol = space.tolerance();
  const ComplexMatrix b = linalg::orthonormalize(n.basis, tol).q;
  const double defect = (b.adjoint() * (space.omega() * b)).frobenius_norm();
  return defect <= tol.structural_tol * space.omega().frobenius_norm();
}

bool is_lagrange(const HermitianSymplecticSpace& space, const Subspace& n) {
  if (space.dimension() % 2 != 0)
    raise(ErrorCode::OddDimension, "is_lagrange: space dimension must be even");
  require_in_space(space, n, "is_lagrange");
  const std::size_t half = space.dimension() / 2;
  const std::size_t rank = linalg::orthonormalize(n.basis, space.tolerance()).rank;
  return rank == half && is_isotropic(space, n);
}

CanonicalPairs complete_to_canonical_basis(const HermitianSymplecticSpace& space,
                                           const Subspace& plane) {
  if (!is_lagrange(space, plane))
    raise(ErrorCode::NotLagrange, "complete_to_canonical_basis: input is not a Lagrange plane");
  const Tolerance& tol = space.tolerance();
  const std::size_t m = space.dimension();
  const std::size_t n = m / 2;

  CanonicalPairs out{ComplexMatrix(m, n), ComplexMatrix(m, n)};

  // current: orthonormal basis of the symplectic subspace not yet exhausted;
  // lag: the leftover part of the plane inside it. Invariant: span(lag) is a
  // subset of span(current).
  ComplexMatrix current = ComplexMatrix::identity(m);
  ComplexMatrix lag = linalg::orthonormalize(plane.basis, tol).q;

  for (std::size_t step = 0; step < n; ++step) {
    const std::vector<Complex> p = lag.col_vector(0);

    // Dual candidates: current minus the plane part. The plane is isotropic,
    // so a nonzero pairing against p must come from here.
    const ComplexMatrix candidates =
        projector_range(current * current.adjoint() - lag * lag.adjoint());

    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t j = 0; j < candidates.cols(); ++j) {
      const double a = std::abs(skew_product(space, p, candidates.col_vector(j)));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best_abs <= 0.0)
      raise(ErrorCode::NotLagrange, "complete_to_canonical_basis: no dual direction found");

    std::vector<Complex> q = candidates.col_vector(best);
    const Complex pairing = skew_product(space, p, q);
    for (auto& x : q) x /= pairing;  // <p, q> = 1

    // <q, q> is purely imaginary; shifting along p makes q isotropic and
    // keeps <p, q> = 1.
    const Complex shift = -0.5 * skew_product(space, q, q);
    for (std::size_t i = 0; i < m; ++i) q[i] += shift * p[i];

    for (std::size_t i = 0; i < m; ++i) {
      out.p(i, step) = p[i];
      out.q(i, step) = q[i];
    }
    if (step + 1 == n) break;

    // Remaining plane columns, corrected to pair to zero with q; the shift is
    // along p, so they stay inside the plane.
    ComplexMatrix next_lag(m, lag.cols() - 1);
    for (std::size_t j = 1; j < lag.cols(); ++j) {
      std::vector<Complex> l = lag.col_vector(j);
      const Complex a = skew_product(space, q, l);
      for (std::size_t i = 0; i < m; ++i) l[i] += a * p[i];
      next_lag.set_col(j - 1, l);
    }
    lag = linalg::orthonormalize(next_lag, tol).q;

    // Shrink current to the vectors skew-orthogonal to both p and q: solve
    // (omega [p q])^H v = 0 inside span(current).
    ComplexMatrix pq(m, 2);
    pq.set_col(0, p);
    pq.set_col(1, q);
    const ComplexMatrix image = linalg::orthonormalize(space.omega() * pq, tol).q;
    const ComplexMatrix constraints = image.adjoint() * current;  // 2 x d
    const ComplexMatrix row_span = linalg::orthonormalize(constraints.adjoint(), tol).q;
    const ComplexMatrix null_basis = euclidean_complement(row_span, current.cols());
    current = current * null_basis;
  }
  return out;
}

bool is_j_unitary(const ComplexMatrix& g, const Tolerance& tol) {
  tol.check();
  if (!g.square() || g.rows() % 2 != 0)
    raise(ErrorCode::OddDimension, "is_j_unitary: even square matrix required");
  const ComplexMatrix j = canonical_j(g.rows() / 2);
  return (g.adjoint() * j * g - j).frobenius_norm() <=
         tol.structural_tol * std::max(1.0, j.frobenius_norm());
}

UnitaryPlane plane_from_unitary(const ComplexMatrix& u, const Tolerance& tol) {
  tol.check();
  if (!u.square()) raise(ErrorCode::DimensionMismatch, "plane_from_unitary: U must be square");
  if (!linalg::classify(u, tol).unitary)
    raise(ErrorCode::NotUnitary, "plane_from_unitary: U is not unitary within tolerance");
  const std::size_t n = u.rows();
  const ComplexMatrix eye = ComplexMatrix::identity(n);
  const ComplexMatrix x = 0.5 * (u + eye);
  const ComplexMatrix y = (0.5 * kI) * (u - eye);

  UnitaryPlane out;
  out.g = ComplexMatrix(2 * n, 2 * n);
  out.g.set_block(0, 0, x);
  out.g.set_block(0, n, y);
  out.g.set_block(n, 0, Complex(-1.0, 0.0) * y);
  out.g.set_block(n, n, x);
  out.plane = Subspace{2 * n, vstack(x, y)};
  return out;
}

ComplexMatrix plane_to_unitary(const Subspace& plane, const Tolerance& tol) {
  tol.check();
  if (plane.ambient_dim % 2 != 0)
    raise(ErrorCode::OddDimension, "plane_to_unitary: ambient dimension must be even");
  const std::size_t n = plane.ambient_dim / 2;
  const HermitianSymplecticSpace j_space = make_space(canonical_j(n), tol);
  if (!is_lagrange(j_space, plane))
    raise(ErrorCode::NotLagrange, "plane_to_unitary: input is not a Lagrange plane of (C^2n, J)");

  // The result does not depend on the basis choice, so work with an
  // orthonormal one; this also tolerates redundant input columns.
  const ComplexMatrix basis = linalg::orthonormalize(plane.basis, tol).q;
  const ComplexMatrix x = basis.block(0, 0, n, n);
  const ComplexMatrix y = basis.block(n, 0, n, n);

  try {
    return linalg::solve_right(x - kI * y, x + kI * y, tol).x;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Singular)
      raise(ErrorCode::Singular,
            "plane_to_unitary: X + iY is singular, Lagrange precondition violated");
    throw;
  }
}

}  // namespace starscatter::hsg
