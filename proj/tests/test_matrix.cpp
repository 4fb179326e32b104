#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "starscatter/matrix.hpp"
#include "support.hpp"

using namespace starscatter;
using namespace starscatter::linalg;
using test_support::distance;
using test_support::random_complex;
using test_support::random_hermitian;
using test_support::random_unitary;

namespace {

ComplexMatrix eig_reconstruction(const EigResult& eig) {
  ComplexMatrix d = ComplexMatrix::diagonal(std::span<const double>(eig.eigenvalues));
  return eig.eigenvectors * d * eig.eigenvectors.adjoint();
}

}  // namespace

TEST_CASE("hermitian_eig on an already diagonal matrix") {
  const ComplexMatrix m = ComplexMatrix::from_rows({{2.0, 0.0}, {0.0, -3.0}});
  const EigResult eig = hermitian_eig(m);
  CHECK(eig.eigenvalues[0] == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(eig.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-14));
  // Columns are the standard basis vectors, permuted into ascending order.
  CHECK(std::abs(eig.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(0, 1)) == doctest::Approx(1.0));
  CHECK(distance(eig_reconstruction(eig), m) <= 1e-12);
}

TEST_CASE("hermitian_eig on the symmetric flip") {
  const ComplexMatrix m = ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  const EigResult eig = hermitian_eig(m);
  CHECK(eig.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(eig.eigenvectors(0, j)) == doctest::Approx(r).epsilon(1e-12));
    CHECK(std::abs(eig.eigenvectors(1, j)) == doctest::Approx(r).epsilon(1e-12));
  }
  CHECK(distance(eig_reconstruction(eig), m) <= 1e-12);
}

TEST_CASE("hermitian_eig recovers a constructed spectrum") {
  // Construct-then-decompose: build M = Q diag(d) Q^H from a known unitary Q
  // and known d, then require the eigensolver to return d.
  std::mt19937_64 rng(20240811);
  const std::size_t n = 8;
  const ComplexMatrix q = random_unitary(n, rng);
  REQUIRE(distance(q.adjoint() * q, ComplexMatrix::identity(n)) <= 1e-13);

  std::vector<double> d = {-4.5, -2.0, -0.5, 0.25, 1.0, 2.5, 3.75, 9.0};
  const ComplexMatrix m = q * ComplexMatrix::diagonal(std::span<const double>(d)) * q.adjoint();
  const EigResult eig = hermitian_eig(m);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(eig.eigenvalues[i] == doctest::Approx(d[i]).epsilon(1e-9));
  CHECK(distance(eig.eigenvectors.adjoint() * eig.eigenvectors, ComplexMatrix::identity(n)) <=
        1e-10);
  CHECK(distance(m * eig.eigenvectors,
                 eig.eigenvectors * ComplexMatrix::diagonal(std::span<const double>(eig.eigenvalues)))
        <= 1e-9 * m.frobenius_norm());
}

TEST_CASE("hermitian_eig rejects non-hermitian input") {
  const ComplexMatrix m = ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  CHECK_THROWS_WITH_AS(hermitian_eig(m), doctest::Contains("not_hermitian"), Error);
}

TEST_CASE("hermitian_eig reconstruction property over assorted sizes") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {2, 3, 5, 8, 13}) {
    const ComplexMatrix m = random_hermitian(n, rng);
    const EigResult eig = hermitian_eig(m);
    CHECK(distance(eig_reconstruction(eig), m) <= 1e-9 * m.frobenius_norm());
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(eig.eigenvalues[i] <= eig.eigenvalues[i + 1]);
  }
}

TEST_CASE("orthonormalize keeps an identity basis") {
  const OrthoResult r = orthonormalize(ComplexMatrix::identity(3));
  CHECK(r.rank == 3);
  CHECK(distance(r.q, ComplexMatrix::identity(3)) <= 1e-14);
}

TEST_CASE("orthonormalize drops dependent columns") {
  ComplexMatrix b(2, 2);
  b(0, 0) = 1.0;
  b(0, 1) = 2.0;
  const OrthoResult r = orthonormalize(b);
  CHECK(r.rank == 1);
  CHECK(std::abs(r.q(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(r.q(1, 0)) == doctest::Approx(0.0));
}

TEST_CASE("orthonormalize produces an orthonormal frame") {
  std::mt19937_64 rng(99);
  const ComplexMatrix b = random_complex(6, 3, rng);
  const OrthoResult r = orthonormalize(b);
  REQUIRE(r.rank == 3);
  CHECK(distance(r.q.adjoint() * r.q, ComplexMatrix::identity(3)) <= 1e-12);

  // Span preservation: projectors onto span(B) and span(Q) agree.
  const OrthoResult rb = orthonormalize(b);
  const ComplexMatrix pq = r.q * r.q.adjoint();
  const ComplexMatrix pb = rb.q * rb.q.adjoint();
  CHECK(distance(pq, pb) <= 1e-12);
}

TEST_CASE("orthonormalize of the zero matrix has rank 0") {
  const OrthoResult r = orthonormalize(ComplexMatrix(4, 2));
  CHECK(r.rank == 0);
  CHECK(r.q.cols() == 0);
}

TEST_CASE("orthonormalize is idempotent on its own output") {
  std::mt19937_64 rng(123);
  const ComplexMatrix b = random_complex(5, 4, rng);
  const OrthoResult first = orthonormalize(b);
  const OrthoResult second = orthonormalize(first.q);
  REQUIRE(second.rank == first.rank);
  CHECK(distance(second.q, first.q) <= 1e-13);
}

TEST_CASE("solve with identity and diagonal systems") {
  std::mt19937_64 rng(5);
  const ComplexMatrix rhs = random_complex(3, 2, rng);
  CHECK(distance(solve(ComplexMatrix::identity(3), rhs).x, rhs) <= 1e-14);

  const ComplexMatrix diag = ComplexMatrix::from_rows({{2.0, 0.0}, {0.0, 4.0}});
  const SolveResult r = solve(diag, ComplexMatrix::identity(2));
  CHECK(distance(r.x, ComplexMatrix::from_rows({{0.5, 0.0}, {0.0, 0.25}})) <= 1e-15);
  CHECK(r.rcond == doctest::Approx(0.5));  // 1 / (|M|_1 |M^-1|_1) = 1 / (4 * 0.5)
}

TEST_CASE("solve recovers a constructed solution") {
  // Construct-then-solve: X0 known, rhs = M * X0.
  std::mt19937_64 rng(17);
  ComplexMatrix m = test_support::random_nonsingular(5, rng);
  const double cond = 1.0 / reciprocal_condition(m);
  REQUIRE(cond < 1e4);
  const ComplexMatrix x0 = random_complex(5, 3, rng);
  const SolveResult r = solve(m, m * x0);
  CHECK(distance(r.x, x0) <= 1e-8 * x0.frobenius_norm() * cond);
}

TEST_CASE("solve flags singular and near-singular systems") {
  const ComplexMatrix singular = ComplexMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
  CHECK_THROWS_WITH_AS(solve(singular, ComplexMatrix::identity(2)), doctest::Contains("singular"),
                       Error);

  const ComplexMatrix nearly = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 1e-13}});
  CHECK_THROWS_WITH_AS(solve(nearly, ComplexMatrix::identity(2)), doctest::Contains("singular"),
                       Error);
  CHECK(reciprocal_condition(nearly) == doctest::Approx(1e-13).epsilon(1e-6));
}

TEST_CASE("solve round-trip error stays bounded on well-conditioned inputs") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = 2 + static_cast<std::size_t>(round % 5);
    const ComplexMatrix m = test_support::random_nonsingular(n, rng);
    const double cond = 1.0 / reciprocal_condition(m);
    if (cond >= 1e4) continue;
    const ComplexMatrix x0 = random_complex(n, n, rng);
    const ComplexMatrix rhs = m * x0;
    const SolveResult r = solve(m, rhs);
    CHECK(distance(m * r.x, rhs) <= 1e-8 * rhs.frobenius_norm() * cond);
  }
}

TEST_CASE("classify recognises structure") {
  const ComplexMatrix i2 = Complex(0.0, 1.0) * ComplexMatrix::identity(2);
  const StructureFlags f1 = classify(i2);
  CHECK_FALSE(f1.hermitian);
  CHECK(f1.skew_hermitian);
  CHECK(f1.unitary);

  // Canonical symplectic structure on C^4.
  ComplexMatrix j(4, 4);
  j(0, 2) = 1.0;
  j(1, 3) = 1.0;
  j(2, 0) = -1.0;
  j(3, 1) = -1.0;
  const StructureFlags f2 = classify(j);
  CHECK_FALSE(f2.hermitian);
  CHECK(f2.skew_hermitian);
  CHECK(f2.unitary);

  std::mt19937_64 rng(44);
  const StructureFlags f3 = classify(test_support::random_hermitian(4, rng));
  CHECK(f3.hermitian);
  CHECK_FALSE(f3.skew_hermitian);
}

TEST_CASE("tolerance invariants are enforced") {
  Tolerance bad;
  bad.structural_tol = 1e-14;
  bad.solve_rcond_floor = 1e-10;
  CHECK_THROWS_AS(classify(ComplexMatrix::identity(2), bad), Error);
  bad.structural_tol = -1.0;
  CHECK_THROWS_AS(classify(ComplexMatrix::identity(2), bad), Error);
}
