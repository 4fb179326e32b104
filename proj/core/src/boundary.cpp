#include "starscatter/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace starscatter::boundary {

namespace {

const Complex kI(0.0, 1.0);

ComplexMatrix ones(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 1.0;
  return m;
}

}  // namespace

BoundaryConditions::BoundaryConditions(ComplexMatrix u, Tolerance tol)
    : u_(std::move(u)), tol_(tol) {
  const std::size_t n = u_.rows();
  const ComplexMatrix eye = ComplexMatrix::identity(n);
  a_ = 0.5 * (u_ + eye);
  b_ = (0.5 * kI) * (u_ - eye);
  hermitian_ = linalg::classify(u_, tol_).hermitian;
}

BoundaryConditions BoundaryConditions::from_unitary(ComplexMatrix u, const Tolerance& tol) {
  tol.check();
  if (!u.square() || u.rows() == 0)
    raise(ErrorCode::DimensionMismatch, "from_unitary: U must be square and non-empty");
  if (!linalg::classify(u, tol).unitary)
    raise(ErrorCode::NotUnitary, "from_unitary: U is not unitary within tolerance");
  return BoundaryConditions(std::move(u), tol);
}

BoundaryConditions BoundaryConditions::from_ks_pair(const ComplexMatrix& a_ks,
                                                    const ComplexMatrix& b_ks,
                                                    const Tolerance& tol) {
  tol.check();
  if (!a_ks.square() || a_ks.rows() != b_ks.rows() || !b_ks.square())
    raise(ErrorCode::DimensionMismatch, "from_ks_pair: A and B must be square of equal size");
  const std::size_t n = a_ks.rows();

  if (linalg::orthonormalize(hstack(a_ks, b_ks).adjoint(), tol).rank != n)
    raise(ErrorCode::RankDeficient, "from_ks_pair: (A B) does not have maximal rank");

  const ComplexMatrix ab = a_ks * b_ks.adjoint();
  const double herm_defect = (ab - ab.adjoint()).frobenius_norm();
  if (herm_defect > tol.structural_tol * std::max(1.0, hstack(a_ks, b_ks).frobenius_norm())) {
    std::ostringstream os;
    os << "from_ks_pair: A B^H is not hermitian (defect " << herm_defect << ")";
    raise(ErrorCode::NotSelfAdjointPair, os.str());
  }

  // (A + iB)(A + iB)^H = A A^H + B B^H is positive definite under the rank
  // condition, so the solve below cannot hit a genuine singularity.
  const ComplexMatrix u =
      Complex(-1.0, 0.0) * linalg::solve(a_ks + kI * b_ks, a_ks - kI * b_ks, tol).x;
  return from_unitary(u, tol);
}

std::vector<Complex> BoundaryConditions::residual(std::span<const Complex> psi0,
                                                  std::span<const Complex> psi0_prime) const {
  const std::size_t n = u_.rows();
  if (psi0.size() != n || psi0_prime.size() != n)
    raise(ErrorCode::DimensionMismatch, "residual: boundary vectors must have length n");
  const ComplexMatrix uh = u_.adjoint();
  const ComplexMatrix eye = ComplexMatrix::identity(n);
  const ComplexMatrix c0 = (0.5 * kI) * (uh - eye);
  const ComplexMatrix c1 = 0.5 * (uh + eye);
  std::vector<Complex> r = c0 * psi0;
  const std::vector<Complex> r1 = c1 * psi0_prime;
  for (std::size_t i = 0; i < n; ++i) r[i] += r1[i];
  return r;
}

ProjectionPair projection_pair(const BoundaryConditions& bc) {
  if (!bc.is_hermitian())
    raise(ErrorCode::NotHermitian,
          "projection_pair: U is not hermitian; use the general kernel form");
  ProjectionPair pair;
  pair.p = bc.a();
  pair.p_perp = ComplexMatrix::identity(bc.n()) - bc.a();
  return pair;
}

BoundaryConditions preset(const std::string& name, std::size_t n, const PresetParams& params,
                          const Tolerance& tol) {
  if (n == 0) raise(ErrorCode::BadParameter, "preset: n must be >= 1");
  const ComplexMatrix eye = ComplexMatrix::identity(n);

  if (name == "dirichlet") return BoundaryConditions::from_unitary(Complex(-1.0, 0.0) * eye, tol);
  if (name == "neumann") return BoundaryConditions::from_unitary(eye, tol);
  if (name == "kirchhoff")
    return BoundaryConditions::from_unitary((2.0 / static_cast<double>(n)) * ones(n) - eye, tol);

  if (name == "delta") {
    if (!params.alpha || !std::isfinite(*params.alpha))
      raise(ErrorCode::BadParameter, "preset delta: finite real alpha required");
    const double alpha = *params.alpha;
    // Continuity across all edges plus sum of outgoing derivatives equal to
    // alpha * psi(0), assembled as a kernel pair.
    ComplexMatrix a(n, n), b(n, n);
    for (std::size_t row = 0; row + 1 < n; ++row) {
      a(row, row) = 1.0;
      a(row, row + 1) = -1.0;
    }
    a(n - 1, 0) = -alpha;
    for (std::size_t j = 0; j < n; ++j) b(n - 1, j) = 1.0;
    return BoundaryConditions::from_ks_pair(a, b, tol);
  }

  if (name == "mixed") {
    if (!params.dirichlet || params.dirichlet->size() != n)
      raise(ErrorCode::BadParameter, "preset mixed: dirichlet mask of length n required");
    ComplexMatrix u(n, n);
    for (std::size_t i = 0; i < n; ++i) u(i, i) = (*params.dirichlet)[i] ? -1.0 : 1.0;
    return BoundaryConditions::from_unitary(u, tol);
  }

  raise(ErrorCode::UnknownPreset, "preset: unknown name '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"dirichlet", "neumann", "kirchhoff", "delta", "mixed"};
}

UnitaryEig unitary_eig(const ComplexMatrix& u, const Tolerance& tol) {
  tol.check();
  if (!u.square()) raise(ErrorCode::DimensionMismatch, "unitary_eig: U must be square");
  if (!linalg::classify(u, tol).unitary)
    raise(ErrorCode::NotUnitary, "unitary_eig: U is not unitary within tolerance");
  const std::size_t n = u.rows();

  // U is normal: diagonalise the commuting hermitian pair (U + U^H)/2 and
  // (U - U^H)/(2i). Eigenvalues sharing a cosine are split by the sine part.
  const ComplexMatrix cos_part = 0.5 * (u + u.adjoint());
  const ComplexMatrix sin_part = Complex(0.0, -0.5) * (u - u.adjoint());

  linalg::EigResult cos_eig = linalg::hermitian_eig(cos_part, tol);
  ComplexMatrix v = cos_eig.eigenvectors;

  const double cluster = 1e-8;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && cos_eig.eigenvalues[end] - cos_eig.eigenvalues[start] <= cluster) ++end;
    if (end - start > 1) {
      const std::size_t width = end - start;
      const ComplexMatrix vc = v.block(0, start, n, width);
      const ComplexMatrix sub = vc.adjoint() * sin_part * vc;
      const linalg::EigResult sub_eig = linalg::hermitian_eig(sub, tol);
      v.set_block(0, start, vc * sub_eig.eigenvectors);
    }
    start = end;
  }

  UnitaryEig out;
  out.eigenvectors = v;
  out.eigenvalues.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::vector<Complex> col = v.col_vector(j);
    const std::vector<Complex> ucol = u * col;
    Complex lambda(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) lambda += std::conj(col[i]) * ucol[i];
    out.eigenvalues[j] = lambda;
  }

  // Residual guard: the two-stage split must actually diagonalise U.
  ComplexMatrix d(n, n);
  for (std::size_t j = 0; j < n; ++j) d(j, j) = out.eigenvalues[j];
  const double residual = (u * v - v * d).frobenius_norm();
  if (residual > 1e-9 * std::max(1.0, u.frobenius_norm())) {
    std::ostringstream os;
    os << "unitary_eig: diagonalisation residual " << residual;
    raise(ErrorCode::NoConvergence, os.str());
  }
  return out;
}

ComplexMatrix spectral_asymptotic_map(const ComplexMatrix& u, const Tolerance& tol,
                                      double cluster_tol) {
  const UnitaryEig eig = unitary_eig(u, tol);
  const std::size_t n = u.rows();
  ComplexMatrix d(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const bool near_minus_one = std::abs(eig.eigenvalues[j] + Complex(1.0, 0.0)) <= cluster_tol;
    d(j, j) = near_minus_one ? -1.0 : 1.0;
  }
  ComplexMatrix u_hat = eig.eigenvectors * d * eig.eigenvectors.adjoint();
  // +-1 spectrum makes the exact result hermitian; fold in rounding noise.
  return 0.5 * (u_hat + u_hat.adjoint());
}

std::vector<BoundState> zero_potential_bound_states(const ComplexMatrix& u, const Tolerance& tol) {
  const UnitaryEig eig = unitary_eig(u, tol);

  // An eigenphase phi in (0, pi) contributes a pole of the zero-potential
  // scattering matrix at k = i * tan(phi / 2). Phases within 1e-8 of 0 or pi
  // (eigenvalues at +1 or -1) contribute nothing; this uses the same window
  // as the spectral map.
  const double phase_window = 1e-8;
  std::vector<double> kappas;
  for (const Complex& lambda : eig.eigenvalues) {
    const double phi = std::atan2(lambda.imag(), lambda.real());
    if (phi > phase_window && phi < std::numbers::pi - phase_window)
      kappas.push_back(std::tan(0.5 * phi));
  }
  std::sort(kappas.begin(), kappas.end());

  std::vector<BoundState> states;
  const double merge_tol = 1e-8;
  for (double kappa : kappas) {
    if (!states.empty() && std::abs(states.back().kappa - kappa) <=
                               merge_tol * std::max(1.0, std::abs(kappa)))
      ++states.back().multiplicity;
    else
      states.push_back(BoundState{kappa, 1});
  }
  return states;
}

}  // namespace starscatter::boundary
