#include "starscatter/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace starscatter::linalg {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    raise(ErrorCode::DimensionMismatch, std::string(op) + ": shapes do not match");
}

void require_finite(const ComplexMatrix& m, const char* op) {
  if (!m.is_finite())
    raise(ErrorCode::BadParameter, std::string(op) + ": input has non-finite entries");
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
  ComplexMatrix m(nr, nc);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != nc) raise(ErrorCode::DimensionMismatch, "from_rows: ragged rows");
    std::size_t j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> v) {
  ComplexMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(i, j) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                                   std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_)
    raise(ErrorCode::DimensionMismatch, "block: out of range");
  ComplexMatrix m(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < ncols; ++j) m(i, j) = (*this)(row0 + i, col0 + j);
  return m;
}

void ComplexMatrix::set_block(std::size_t row0, std::size_t col0, const ComplexMatrix& b) {
  if (row0 + b.rows() > rows_ || col0 + b.cols() > cols_)
    raise(ErrorCode::DimensionMismatch, "set_block: out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(row0 + i, col0 + j) = b(i, j);
}

std::vector<Complex> ComplexMatrix::col_vector(std::size_t j) const {
  std::vector<Complex> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void ComplexMatrix::set_col(std::size_t j, std::span<const Complex> v) {
  if (v.size() != rows_) raise(ErrorCode::DimensionMismatch, "set_col: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::one_norm() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double ComplexMatrix::max_abs() const {
  double best = 0.0;
  for (const auto& v : data_) best = std::max(best, std::abs(v));
  return best;
}

bool ComplexMatrix::is_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) raise(ErrorCode::DimensionMismatch, "operator*: inner dimensions");
  ComplexMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const Complex a = lhs(i, k);
      if (a == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }
ComplexMatrix operator*(double scale, ComplexMatrix m) { return m *= Complex(scale, 0.0); }

std::vector<Complex> operator*(const ComplexMatrix& m, std::span<const Complex> v) {
  if (m.cols() != v.size()) raise(ErrorCode::DimensionMismatch, "matvec: length mismatch");
  std::vector<Complex> out(m.rows(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) raise(ErrorCode::DimensionMismatch, "hstack: row mismatch");
  ComplexMatrix out(a.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(0, a.cols(), b);
  return out;
}

ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.cols()) raise(ErrorCode::DimensionMismatch, "vstack: column mismatch");
  ComplexMatrix out(a.rows() + b.rows(), a.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), 0, b);
  return out;
}

EigResult hermitian_eig(const ComplexMatrix& m, const Tolerance& tol) {
  tol.check();
  require_finite(m, "hermitian_eig");
  if (!m.square()) raise(ErrorCode::DimensionMismatch, "hermitian_eig: matrix must be square");
  const std::size_t n = m.rows();
  const double norm = m.frobenius_norm();
  if ((m - m.adjoint()).frobenius_norm() > tol.structural_tol * std::max(1e-300, norm)) {
    std::ostringstream os;
    os << "hermitian_eig: |M - M^H| = " << (m - m.adjoint()).frobenius_norm()
       << " exceeds tolerance";
    raise(ErrorCode::NotHermitian, os.str());
  }

  // Work on the hermitian part; rounding asymmetry within tolerance is folded in.
  ComplexMatrix a = 0.5 * (m + m.adjoint());
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double off_target = 1e-14 * std::max(norm, 1e-300);
  const int max_sweeps = 60;
  int sweep = 0;
  double off = 0.0;
  for (; sweep < max_sweeps; ++sweep) {
    off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    off = std::sqrt(2.0 * off);
    if (off <= off_target) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double abs_apq = std::abs(apq);
        if (abs_apq == 0.0) continue;
        const double alpha = a(p, p).real();
        const double gamma = a(q, q).real();
        const Complex phase = apq / abs_apq;
        const double tau = (gamma - alpha) / (2.0 * abs_apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex spq = s * phase;             // G(p,q) entry
        const Complex spq_conj = std::conj(spq);   // -G(q,p) entry

        // A <- G^H A G, touching only rows/columns p and q.
        for (std::size_t j = 0; j < n; ++j) {
          const Complex ajp = a(j, p);
          const Complex ajq = a(j, q);
          a(j, p) = c * ajp - spq_conj * ajq;
          a(j, q) = spq * ajp + c * ajq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const Complex apj = a(p, j);
          const Complex aqj = a(q, j);
          a(p, j) = c * apj - spq * aqj;
          a(q, j) = spq_conj * apj + c * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);

        for (std::size_t j = 0; j < n; ++j) {
          const Complex vjp = v(j, p);
          const Complex vjq = v(j, q);
          v(j, p) = c * vjp - spq_conj * vjq;
          v(j, q) = spq * vjp + c * vjq;
        }
      }
    }
  }
  if (sweep == max_sweeps) {
    std::ostringstream os;
    os << "hermitian_eig: off-diagonal residual " << off << " after " << max_sweeps << " sweeps";
    raise(ErrorCode::NoConvergence, os.str());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigResult result;
  result.eigenvalues.resize(n);
  result.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    result.eigenvalues[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) result.eigenvectors(i, j) = v(i, order[j]);
  }
  return result;
}

OrthoResult orthonormalize(const ComplexMatrix& b, const Tolerance& tol) {
  tol.check();
  require_finite(b, "orthonormalize");
  const std::size_t m = b.rows();
  const std::size_t n = b.cols();
  const double threshold = tol.structural_tol * b.frobenius_norm();

  OrthoResult result;
  result.q = ComplexMatrix(m, 0);
  if (n == 0 || b.frobenius_norm() == 0.0) return result;

  std::vector<std::vector<Complex>> basis;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Complex> v = b.col_vector(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        Complex proj(0.0, 0.0);
        for (std::size_t i = 0; i < m; ++i) proj += std::conj(q[i]) * v[i];
        for (std::size_t i = 0; i < m; ++i) v[i] -= proj * q[i];
      }
    }
    double nrm = 0.0;
    for (const auto& x : v) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    if (nrm > threshold) {
      for (auto& x : v) x /= nrm;
      basis.push_back(std::move(v));
    }
  }

  result.rank = basis.size();
  result.q = ComplexMatrix(m, result.rank);
  for (std::size_t j = 0; j < result.rank; ++j) result.q.set_col(j, basis[j]);
  return result;
}

namespace {

struct LuFactor {
  ComplexMatrix lu;
  std::vector<std::size_t> perm;
  bool singular = false;
};

LuFactor lu_factor(const ComplexMatrix& m) {
  const std::size_t n = m.rows();
  LuFactor f{m, std::vector<std::size_t>(n), false};
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(f.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(f.lu(i, k));
      if (cand > best) {
        best = cand;
        piv = i;
      }
    }
    if (best == 0.0) {
      f.singular = true;
      return f;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex factor = f.lu(i, k) / f.lu(k, k);
      f.lu(i, k) = factor;
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= factor * f.lu(k, j);
    }
  }
  return f;
}

void lu_solve_inplace(const LuFactor& f, std::vector<Complex>& x) {
  const std::size_t n = f.perm.size();
  std::vector<Complex> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = x[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) b[i] -= f.lu(i, j) * b[j];
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) b[ii] -= f.lu(ii, j) * b[j];
    b[ii] /= f.lu(ii, ii);
  }
  x = std::move(b);
}

double inverse_one_norm(const LuFactor& f) {
  const std::size_t n = f.perm.size();
  double best = 0.0;
  std::vector<Complex> e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), Complex(0.0, 0.0));
    e[j] = 1.0;
    lu_solve_inplace(f, e);
    double s = 0.0;
    for (const auto& v : e) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

SolveResult solve(const ComplexMatrix& m, const ComplexMatrix& rhs, const Tolerance& tol) {
  tol.check();
  require_finite(m, "solve");
  require_finite(rhs, "solve");
  if (!m.square()) raise(ErrorCode::DimensionMismatch, "solve: system matrix must be square");
  if (m.rows() != rhs.rows()) raise(ErrorCode::DimensionMismatch, "solve: rhs row mismatch");
  const std::size_t n = m.rows();

  const LuFactor f = lu_factor(m);
  if (f.singular) raise(ErrorCode::Singular, "solve: exactly singular pivot");

  const double rcond = 1.0 / std::max(1e-300, m.one_norm() * inverse_one_norm(f));
  if (rcond < tol.solve_rcond_floor) {
    std::ostringstream os;
    os << "solve: reciprocal condition " << rcond << " below floor " << tol.solve_rcond_floor;
    raise(ErrorCode::Singular, os.str());
  }

  SolveResult result;
  result.rcond = rcond;
  result.x = ComplexMatrix(n, rhs.cols());
  for (std::size_t j = 0; j < rhs.cols(); ++j) {
    std::vector<Complex> col = rhs.col_vector(j);
    lu_solve_inplace(f, col);
    result.x.set_col(j, col);
  }
  return result;
}

SolveResult solve_right(const ComplexMatrix& b, const ComplexMatrix& a, const Tolerance& tol) {
  // X A = B  <=>  A^T X^T = B^T
  SolveResult r = solve(a.transpose(), b.transpose(), tol);
  r.x = r.x.transpose();
  return r;
}

double reciprocal_condition(const ComplexMatrix& m) {
  if (!m.square()) raise(ErrorCode::DimensionMismatch, "reciprocal_condition: square input required");
  const LuFactor f = lu_factor(m);
  if (f.singular) return 0.0;
  return 1.0 / std::max(1e-300, m.one_norm() * inverse_one_norm(f));
}

StructureFlags classify(const ComplexMatrix& m, const Tolerance& tol) {
  tol.check();
  require_finite(m, "classify");
  if (!m.square()) raise(ErrorCode::DimensionMismatch, "classify: matrix must be square");
  const double scale = tol.structural_tol * std::max(1.0, m.frobenius_norm());
  const ComplexMatrix adj = m.adjoint();
  StructureFlags flags;
  flags.hermitian = (m - adj).frobenius_norm() <= scale;
  flags.skew_hermitian = (m + adj).frobenius_norm() <= scale;
  flags.unitary = (adj * m - ComplexMatrix::identity(m.rows())).frobenius_norm() <= scale;
  return flags;
}

}  // namespace starscatter::linalg
