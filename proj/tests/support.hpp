#pragma once

#include <complex>
#include <random>
#include <vector>

#include "starscatter/hsg.hpp"
#include "starscatter/matrix.hpp"

namespace test_support {

using starscatter::linalg::Complex;
using starscatter::linalg::ComplexMatrix;

inline ComplexMatrix random_complex(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return m;
}

inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  for (;;) {
    const auto ortho = starscatter::linalg::orthonormalize(random_complex(n, n, rng));
    if (ortho.rank == n) return ortho.q;
  }
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  const ComplexMatrix a = random_complex(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

/// Random skew-hermitian, resampled until comfortably nondegenerate.
inline ComplexMatrix random_skew_hermitian_nondegenerate(std::size_t m, std::mt19937_64& rng) {
  for (;;) {
    ComplexMatrix omega = Complex(0.0, 1.0) * random_hermitian(m, rng);
    const auto eig = starscatter::linalg::hermitian_eig(Complex(0.0, -1.0) * omega);
    double min_abs = 1e300;
    for (double v : eig.eigenvalues) min_abs = std::min(min_abs, std::abs(v));
    if (min_abs > 1e-3 * omega.frobenius_norm()) return omega;
  }
}

inline ComplexMatrix random_nonsingular(std::size_t n, std::mt19937_64& rng) {
  for (;;) {
    ComplexMatrix m = random_complex(n, n, rng);
    if (starscatter::linalg::reciprocal_condition(m) > 1e-4) return m;
  }
}

inline std::vector<Complex> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<Complex> v(n);
  for (auto& x : v) x = Complex(dist(rng), dist(rng));
  return v;
}

/// Random Lagrange plane of (C^{2n}, J) via the unitary parameterisation.
inline starscatter::hsg::Subspace random_lagrange_plane(std::size_t n, std::mt19937_64& rng) {
  return starscatter::hsg::plane_from_unitary(random_unitary(n, rng)).plane;
}

inline double distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

}  // namespace test_support
