#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "starscatter/matrix.hpp"

namespace starscatter::boundary {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::Tolerance;

/// Self-adjoint vertex conditions on a star graph with n edges, held as a
/// unitary n x n matrix U together with A = (U+I)/2 and B = (i/2)(U-I).
/// A vector of boundary data (psi0, psi0') is admissible iff
///   (i/2)(U^H - I) psi0 + (1/2)(U^H + I) psi0' = 0,
/// equivalently iff (psi0; psi0') lies in the column span of [A; B].
class BoundaryConditions {
 public:
  static BoundaryConditions from_unitary(ComplexMatrix u, const Tolerance& tol = {});

  /// Kostrykin-Schrader style pair: kernel conditions A psi0 + B psi0' = 0
  /// with (A B) of maximal rank and A B^H hermitian. Recovers
  /// U = -(A + iB)^{-1} (A - iB).
  static BoundaryConditions from_ks_pair(const ComplexMatrix& a_ks, const ComplexMatrix& b_ks,
                                         const Tolerance& tol = {});

  std::size_t n() const noexcept { return u_.rows(); }
  const ComplexMatrix& unitary() const noexcept { return u_; }
  const ComplexMatrix& a() const noexcept { return a_; }
  const ComplexMatrix& b() const noexcept { return b_; }
  bool is_hermitian() const noexcept { return hermitian_; }
  const Tolerance& tolerance() const noexcept { return tol_; }

  /// Residual of the kernel-form conditions; zero iff (psi0, psi0') is
  /// admissible boundary data.
  std::vector<Complex> residual(std::span<const Complex> psi0,
                                std::span<const Complex> psi0_prime) const;

 private:
  BoundaryConditions(ComplexMatrix u, Tolerance tol);

  ComplexMatrix u_, a_, b_;
  bool hermitian_ = false;
  Tolerance tol_;
};

struct ProjectionPair {
  ComplexMatrix p;       // (U+I)/2
  ComplexMatrix p_perp;  // I - p
};

/// For hermitian U the conditions split into P_perp psi0 = 0 and
/// P psi0' = 0 with orthogonal projections. Throws NotHermitian otherwise.
ProjectionPair projection_pair(const BoundaryConditions& bc);

struct PresetParams {
  std::optional<double> alpha;                    // delta coupling strength
  std::optional<std::vector<bool>> dirichlet;     // mixed: per-edge Dirichlet flags
};

/// Named families: "dirichlet" (U = -I), "neumann" (U = I), "kirchhoff"
/// (U = (2/n) * ones - I), "delta" (continuity plus sum of derivatives =
/// alpha * psi(0)), "mixed" (U = diag(+-1), -1 on Dirichlet edges).
BoundaryConditions preset(const std::string& name, std::size_t n, const PresetParams& params = {},
                          const Tolerance& tol = {});

std::vector<std::string> preset_names();

/// High-frequency limit of the scattering matrix: every unitary eigenvalue of
/// U except -1 is sent to +1, -1 stays. Eigenvalues within cluster_tol of -1
/// are treated as -1; the map is discontinuous there and the window makes the
/// choice explicit. The result is hermitian, unitary, and an involution.
ComplexMatrix spectral_asymptotic_map(const ComplexMatrix& u, const Tolerance& tol = {},
                                      double cluster_tol = 1e-8);

struct BoundState {
  double kappa = 0.0;  // eigenvalue at energy -kappa^2
  int multiplicity = 1;
};

/// Bound states of the zero-potential operator with vertex condition U: one
/// per eigenphase phi in (0, pi), at kappa = tan(phi/2). Hermitian U (all
/// eigenvalues +-1) has none. Sorted by kappa ascending.
std::vector<BoundState> zero_potential_bound_states(const ComplexMatrix& u,
                                                    const Tolerance& tol = {});

/// Eigendecomposition of a unitary matrix (used by the spectral map and the
/// bound-state search; exposed for the scattering diagnostics).
struct UnitaryEig {
  std::vector<Complex> eigenvalues;
  ComplexMatrix eigenvectors;
};

UnitaryEig unitary_eig(const ComplexMatrix& u, const Tolerance& tol = {});

}  // namespace starscatter::boundary
