#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "starscatter/boundary.hpp"
#include "starscatter/matrix.hpp"

namespace starscatter::scattering {

using boundary::BoundaryConditions;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::Tolerance;

/// Real-valued edge potential with compact support: q(x) = 0 for
/// x > support_end. Sampled potentials are evaluated by linear interpolation.
class Potential {
 public:
  enum class Kind { Zero, PiecewiseConstant, Sampled };

  struct Segment {
    double x0 = 0.0;
    double x1 = 0.0;
    double value = 0.0;

    bool operator==(const Segment&) const = default;
  };

  static Potential zero();
  static Potential piecewise_constant(std::vector<Segment> segments);
  static Potential sampled(std::vector<double> x, std::vector<double> q);

  Kind kind() const noexcept { return kind_; }
  double support_end() const noexcept { return support_end_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const std::vector<double>& sample_x() const noexcept { return xs_; }
  const std::vector<double>& sample_q() const noexcept { return qs_; }

  double operator()(double x) const;

  /// x-values where q loses smoothness; integration steps never straddle them.
  std::vector<double> breakpoints() const;

  bool operator==(const Potential& rhs) const = default;

 private:
  Kind kind_ = Kind::Zero;
  std::vector<Segment> segments_;
  std::vector<double> xs_, qs_;
  double support_end_ = 0.0;
};

/// Numerical estimate of the first-moment integral of (1+x)|q| over the
/// support. Throws on non-finite samples or negative support coordinates.
double validate_potential(const Potential& p);

/// True when a sampled potential carries more than 1e-6 of its moment in the
/// last 10% of the support: the compact-support truncation is then visible.
bool has_tail_mass_warning(const Potential& p);

struct StarGraph {
  std::size_t n = 0;
  std::vector<Potential> potentials;  // one per edge

  static StarGraph uniform(std::size_t n, Potential p);
  static StarGraph with_potentials(std::vector<Potential> potentials);
};

/// Jost data for one edge at wavenumber k: value and derivative at the vertex
/// of the solution matching e^{ikx} beyond the support.
struct JostOrigin {
  double k = 0.0;
  Complex f0{1.0, 0.0};
  Complex f0x{0.0, 0.0};
  double estimated_error = 0.0;
};

struct JostOptions {
  double k_min = 1e-3;
  double rel_tol = 1e-9;     // step-halving target on the origin values
  int max_refinements = 10;  // halvings of the initial step before giving up
};

/// Integrates -f'' + q f = k^2 f backwards from the support end with exact
/// free initial data, classical RK4 on (f, f'), halving the step until two
/// consecutive refinements agree to rel_tol.
JostOrigin jost_at_origin(const Potential& p, double k, const JostOptions& options = {});

struct MMatrices {
  double k = 0.0;
  ComplexMatrix m_plus;
  ComplexMatrix m_minus;
  double m_minus_rcond = 0.0;
};

/// Expansion coefficients of the boundary-value solution in the Jost basis:
///   M_pm = +- (1 / 2ik) [ F_pm^H B - F_pm,x^H A ]
/// with F_pm the diagonal Jost-function matrices; for real k the involution
/// ^H reduces to the conjugate transpose, and F_- = conj(F_+).
MMatrices m_matrices(std::span<const JostOrigin> jost, const BoundaryConditions& bc);

/// S = M_+ M_-^{-1}. Throws Singular (reporting k and the condition estimate)
/// when M_- is numerically singular.
ComplexMatrix scattering_matrix(const MMatrices& m, const Tolerance& tol = {});

/// Projection form for hermitian U:
///   S = -[ i F_- P_perp + F_-,x P ] [ i F_+ P_perp + F_+,x P ]^{-1}.
/// Agrees with the general pipeline on the same inputs.
ComplexMatrix hermitian_case_matrix(const BoundaryConditions& bc, std::span<const JostOrigin> jost,
                                    const Tolerance& tol = {});

/// Matrix Wronskian Y1^H Y2' - Y1'^H Y2 evaluated from blocks at one point.
ComplexMatrix wronskian(const ComplexMatrix& y1, const ComplexMatrix& y1x, const ComplexMatrix& y2,
                        const ComplexMatrix& y2x);

struct KGrid {
  enum class Spacing { Linear, Log };

  double k_min = 0.0;
  double k_max = 0.0;
  std::size_t count = 0;
  Spacing spacing = Spacing::Linear;

  void validate() const;
  std::vector<double> points() const;
};

enum class PointStatus { Ok, Failed };

struct ScatteringResult {
  double k = 0.0;
  ComplexMatrix s;
  ComplexMatrix m_plus;
  ComplexMatrix m_minus;
  double unitarity_defect = 0.0;  // |S^H S - I|_F
  double m_minus_rcond = 0.0;
  PointStatus status = PointStatus::Ok;
  std::string error;  // error-code name when status == Failed
};

/// One result per grid point, sorted by k. Failures at a point are recorded
/// in the result and the sweep continues. Evaluation order is fixed, so
/// identical inputs give bit-identical output.
std::vector<ScatteringResult> scattering_sweep(const StarGraph& graph,
                                               const BoundaryConditions& bc, const KGrid& grid,
                                               const JostOptions& jost_options = {},
                                               const Tolerance& tol = {});

struct DecayReport {
  struct Checkpoint {
    double k = 0.0;
    double defect = 0.0;  // |S(k) - U_hat|_F
  };
  std::vector<Checkpoint> table;        // every swept k
  std::vector<Checkpoint> checkpoints;  // nearest grid points to 10, 100, 1000
  ComplexMatrix u_hat;
  double fitted_c = 0.0;  // max over checkpoints of defect * k
  bool decreasing = false;
  bool decay_bounded = false;  // last checkpoint defect <= fitted_c / k
};

/// Checks |S(k) - U_hat| against the expected 1/k falloff. Requires the sweep
/// to reach at least k = 100.
DecayReport asymptotic_check(std::span<const ScatteringResult> results,
                             const BoundaryConditions& bc);

}  // namespace starscatter::scattering
