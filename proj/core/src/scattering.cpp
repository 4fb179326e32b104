#include "starscatter/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace starscatter::scattering {

namespace {

const Complex kImag(0.0, 1.0);

void require_finite_real(double v, const char* what) {
  if (!std::isfinite(v)) raise(ErrorCode::NonFiniteSample, std::string(what) + " is not finite");
}

}  // namespace

Potential Potential::zero() { return Potential{}; }

Potential Potential::piecewise_constant(std::vector<Segment> segments) {
  Potential p;
  p.kind_ = Kind::PiecewiseConstant;
  for (const Segment& s : segments) {
    require_finite_real(s.x0, "segment x0");
    require_finite_real(s.x1, "segment x1");
    require_finite_real(s.value, "segment value");
    if (s.x0 < 0.0 || s.x1 < 0.0)
      raise(ErrorCode::NegativeSupport, "piecewise_constant: segment on negative axis");
    if (s.x1 < s.x0) raise(ErrorCode::BadParameter, "piecewise_constant: segment with x1 < x0");
    p.support_end_ = std::max(p.support_end_, s.x1);
  }
  std::stable_sort(segments.begin(), segments.end(),
                   [](const Segment& a, const Segment& b) { return a.x0 < b.x0; });
  for (std::size_t i = 0; i + 1 < segments.size(); ++i)
    if (segments[i].x1 > segments[i + 1].x0 + 1e-15)
      raise(ErrorCode::BadParameter, "piecewise_constant: overlapping segments");
  p.segments_ = std::move(segments);
  return p;
}

Potential Potential::sampled(std::vector<double> x, std::vector<double> q) {
  if (x.size() != q.size() || x.size() < 2)
    raise(ErrorCode::BadParameter, "sampled: need matching x/q arrays with at least 2 points");
  for (double v : x) {
    require_finite_real(v, "sample x");
    if (v < 0.0) raise(ErrorCode::NegativeSupport, "sampled: grid point on negative axis");
  }
  for (double v : q) require_finite_real(v, "sample q");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1])) raise(ErrorCode::BadParameter, "sampled: grid must strictly increase");

  Potential p;
  p.kind_ = Kind::Sampled;
  p.support_end_ = x.back();
  p.xs_ = std::move(x);
  p.qs_ = std::move(q);
  return p;
}

double Potential::operator()(double x) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::PiecewiseConstant: {
      for (const Segment& s : segments_)
        if (x >= s.x0 && x < s.x1) return s.value;
      return 0.0;
    }
    case Kind::Sampled: {
      if (x < xs_.front() || x > xs_.back()) return 0.0;
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      if (it == xs_.begin()) return qs_.front();
      if (it == xs_.end()) return qs_.back();
      const std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
      const std::size_t lo = hi - 1;
      const double t = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
      return qs_[lo] + t * (qs_[hi] - qs_[lo]);
    }
  }
  return 0.0;
}

std::vector<double> Potential::breakpoints() const {
  std::vector<double> pts{0.0, support_end_};
  if (kind_ == Kind::PiecewiseConstant) {
    for (const Segment& s : segments_) {
      pts.push_back(s.x0);
      pts.push_back(s.x1);
    }
  } else if (kind_ == Kind::Sampled) {
    pts.insert(pts.end(), xs_.begin(), xs_.end());
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            pts.end());
  std::erase_if(pts, [this](double v) { return v < 0.0 || v > support_end_; });
  return pts;
}

double validate_potential(const Potential& p) {
  switch (p.kind()) {
    case Potential::Kind::Zero:
      return 0.0;
    case Potential::Kind::PiecewiseConstant: {
      double moment = 0.0;
      for (const auto& s : p.segments())
        moment += std::abs(s.value) * ((s.x1 - s.x0) + 0.5 * (s.x1 * s.x1 - s.x0 * s.x0));
      return moment;
    }
    case Potential::Kind::Sampled: {
      // Trapezoid rule for (1+x)|q| on the sample grid.
      const auto& x = p.sample_x();
      const auto& q = p.sample_q();
      double moment = 0.0;
      for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double f0 = (1.0 + x[i]) * std::abs(q[i]);
        const double f1 = (1.0 + x[i + 1]) * std::abs(q[i + 1]);
        moment += 0.5 * (f0 + f1) * (x[i + 1] - x[i]);
      }
      return moment;
    }
  }
  return 0.0;
}

bool has_tail_mass_warning(const Potential& p) {
  if (p.kind() != Potential::Kind::Sampled) return false;
  const double total = validate_potential(p);
  if (total <= 0.0) return false;

  const auto& x = p.sample_x();
  const auto& q = p.sample_q();
  const double tail_start = p.support_end() * 0.9;
  double tail = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i + 1] <= tail_start) continue;
    const double lo = std::max(x[i], tail_start);
    const double f0 = (1.0 + lo) * std::abs(q[i]);
    const double f1 = (1.0 + x[i + 1]) * std::abs(q[i + 1]);
    tail += 0.5 * (f0 + f1) * (x[i + 1] - lo);
  }
  return tail > 1e-6 * total;
}

StarGraph StarGraph::uniform(std::size_t n, Potential p) {
  if (n == 0) raise(ErrorCode::BadParameter, "StarGraph: n must be >= 1");
  validate_potential(p);
  StarGraph g;
  g.n = n;
  g.potentials.assign(n, std::move(p));
  return g;
}

StarGraph StarGraph::with_potentials(std::vector<Potential> potentials) {
  if (potentials.empty()) raise(ErrorCode::BadParameter, "StarGraph: n must be >= 1");
  for (const Potential& p : potentials) validate_potential(p);
  StarGraph g;
  g.n = potentials.size();
  g.potentials = std::move(potentials);
  return g;
}

namespace {

struct JostState {
  Complex f;
  Complex fx;
};

/// One backward pass at the given base step: RK4 on (f, f') from the support
/// end down to 0, with steps aligned to the potential's breakpoints.
JostState integrate_once(const Potential& p, double k, double base_step) {
  const std::vector<double> pts = p.breakpoints();
  const double k2 = k * k;
  const double support = p.support_end();

  JostState y{std::exp(kImag * k * support), kImag * k * std::exp(kImag * k * support)};

  const bool constant_intervals = p.kind() == Potential::Kind::PiecewiseConstant;

  for (std::size_t seg = pts.size(); seg-- > 1;) {
    const double x_hi = pts[seg];
    const double x_lo = pts[seg - 1];
    const double len = x_hi - x_lo;
    if (len <= 0.0) continue;

    // Stage evaluations may land exactly on an interval edge, where the
    // half-open segment convention would read the neighbouring region; inside
    // a smoothness interval of a piecewise-constant potential the value is
    // the midpoint one.
    const double q_const = constant_intervals ? p(0.5 * (x_lo + x_hi)) : 0.0;
    auto rhs = [&](double x, const JostState& s) {
      const double q = constant_intervals ? q_const : p(x);
      return JostState{s.fx, (q - k2) * s.f};
    };

    const std::size_t steps = static_cast<std::size_t>(std::ceil(len / base_step));
    const double h = -len / static_cast<double>(steps);
    double x = x_hi;
    for (std::size_t i = 0; i < steps; ++i) {
      const JostState k1 = rhs(x, y);
      const JostState k2s = rhs(x + 0.5 * h, {y.f + 0.5 * h * k1.f, y.fx + 0.5 * h * k1.fx});
      const JostState k3 = rhs(x + 0.5 * h, {y.f + 0.5 * h * k2s.f, y.fx + 0.5 * h * k2s.fx});
      const JostState k4 = rhs(x + h, {y.f + h * k3.f, y.fx + h * k3.fx});
      y.f += (h / 6.0) * (k1.f + 2.0 * k2s.f + 2.0 * k3.f + k4.f);
      y.fx += (h / 6.0) * (k1.fx + 2.0 * k2s.fx + 2.0 * k3.fx + k4.fx);
      x = x_hi + (static_cast<double>(i + 1)) * h;
    }
  }
  return y;
}

}  // namespace

JostOrigin jost_at_origin(const Potential& p, double k, const JostOptions& options) {
  if (!std::isfinite(k) || std::abs(k) < options.k_min) {
    std::ostringstream os;
    os << "jost_at_origin: |k| = " << std::abs(k) << " below floor " << options.k_min;
    raise(ErrorCode::KTooSmall, os.str());
  }
  JostOrigin out;
  out.k = k;
  if (p.support_end() == 0.0 || p.kind() == Potential::Kind::Zero) {
    out.f0 = Complex(1.0, 0.0);
    out.f0x = kImag * k;
    out.estimated_error = 0.0;
    return out;
  }

  const double h0 = std::min(0.01, 0.1 / std::abs(k));
  JostState prev{};
  bool have_prev = false;
  for (int level = 0; level <= options.max_refinements; ++level) {
    const double h = h0 / static_cast<double>(1 << level);
    const JostState cur = integrate_once(p, k, h);
    if (have_prev) {
      // |f| |f'| >= |k| by the Wronskian, so this scale never collapses.
      const double scale = std::max(std::abs(cur.f), std::abs(cur.fx) / std::abs(k));
      const double diff = std::max(std::abs(cur.f - prev.f), std::abs(cur.fx - prev.fx) / std::abs(k));
      const double rel = diff / scale;
      if (rel < options.rel_tol) {
        out.f0 = cur.f;
        out.f0x = cur.fx;
        out.estimated_error = rel;
        return out;
      }
    }
    prev = cur;
    have_prev = true;
  }
  std::ostringstream os;
  os << "jost_at_origin: step-halving did not reach rel_tol " << options.rel_tol << " within "
     << options.max_refinements << " refinements at k = " << k;
  raise(ErrorCode::IntegrationFailure, os.str());
}

namespace {

void require_shared_k(std::span<const JostOrigin> jost, std::size_t n) {
  if (jost.size() != n)
    raise(ErrorCode::DimensionMismatch, "jost data count does not match edge count");
  for (const JostOrigin& j : jost)
    if (j.k != jost[0].k) raise(ErrorCode::KMismatch, "jost data carry different wavenumbers");
  if (jost[0].k == 0.0) raise(ErrorCode::KTooSmall, "k must be nonzero");
}

}  // namespace

MMatrices m_matrices(std::span<const JostOrigin> jost, const BoundaryConditions& bc) {
  const std::size_t n = bc.n();
  require_shared_k(jost, n);
  const double k = jost[0].k;

  // Diagonal Jost-function matrices; for real k and real q the minus
  // solution is the conjugate of the plus one, so F_+^H = F_- and vice versa.
  ComplexMatrix f_plus_h(n, n), f_plus_x_h(n, n), f_minus_h(n, n), f_minus_x_h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    f_plus_h(i, i) = std::conj(jost[i].f0);
    f_plus_x_h(i, i) = std::conj(jost[i].f0x);
    f_minus_h(i, i) = jost[i].f0;
    f_minus_x_h(i, i) = jost[i].f0x;
  }

  const Complex pref = 1.0 / (2.0 * kImag * k);
  MMatrices out;
  out.k = k;
  out.m_plus = pref * (f_plus_h * bc.b() - f_plus_x_h * bc.a());
  out.m_minus = (-pref) * (f_minus_h * bc.b() - f_minus_x_h * bc.a());
  out.m_minus_rcond = linalg::reciprocal_condition(out.m_minus);
  return out;
}

ComplexMatrix scattering_matrix(const MMatrices& m, const Tolerance& tol) {
  tol.check();
  if (m.m_minus_rcond < tol.solve_rcond_floor) {
    std::ostringstream os;
    os << "scattering_matrix: M_- numerically singular at k = " << m.k
       << " (rcond = " << m.m_minus_rcond << ")";
    raise(ErrorCode::Singular, os.str());
  }
  return linalg::solve_right(m.m_plus, m.m_minus, tol).x;
}

ComplexMatrix hermitian_case_matrix(const BoundaryConditions& bc, std::span<const JostOrigin> jost,
                                    const Tolerance& tol) {
  const boundary::ProjectionPair proj = boundary::projection_pair(bc);
  const std::size_t n = bc.n();
  require_shared_k(jost, n);

  ComplexMatrix f_plus(n, n), f_plus_x(n, n), f_minus(n, n), f_minus_x(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    f_plus(i, i) = jost[i].f0;
    f_plus_x(i, i) = jost[i].f0x;
    f_minus(i, i) = std::conj(jost[i].f0);
    f_minus_x(i, i) = std::conj(jost[i].f0x);
  }

  const ComplexMatrix numer = kImag * f_minus * proj.p_perp + f_minus_x * proj.p;
  const ComplexMatrix denom = kImag * f_plus * proj.p_perp + f_plus_x * proj.p;
  return Complex(-1.0, 0.0) * linalg::solve_right(numer, denom, tol).x;
}

ComplexMatrix wronskian(const ComplexMatrix& y1, const ComplexMatrix& y1x, const ComplexMatrix& y2,
                        const ComplexMatrix& y2x) {
  return y1.adjoint() * y2x - y1x.adjoint() * y2;
}

void KGrid::validate() const {
  if (!(k_min > 0.0) || !std::isfinite(k_min) || !std::isfinite(k_max))
    raise(ErrorCode::BadParameter, "kgrid: k_min must be > 0 and finite");
  if (k_min < 1e-3) raise(ErrorCode::KTooSmall, "kgrid: k_min below supported floor 1e-3");
  if (count == 0) raise(ErrorCode::BadParameter, "kgrid: count must be >= 1");
  if (count > 1 && !(k_max > k_min))
    raise(ErrorCode::BadParameter, "kgrid: k_max must exceed k_min");
}

std::vector<double> KGrid::points() const {
  validate();
  std::vector<double> pts(count);
  if (count == 1) {
    pts[0] = k_min;
    return pts;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    pts[i] = spacing == Spacing::Linear ? k_min + t * (k_max - k_min)
                                        : std::exp(std::log(k_min) + t * (std::log(k_max) - std::log(k_min)));
  }
  pts.front() = k_min;
  pts.back() = k_max;
  return pts;
}

std::vector<ScatteringResult> scattering_sweep(const StarGraph& graph,
                                               const BoundaryConditions& bc, const KGrid& grid,
                                               const JostOptions& jost_options,
                                               const Tolerance& tol) {
  if (graph.n != bc.n())
    raise(ErrorCode::DimensionMismatch, "scattering_sweep: graph and boundary edge counts differ");
  const std::vector<double> ks = grid.points();
  const std::size_t n = graph.n;
  const ComplexMatrix eye = ComplexMatrix::identity(n);

  std::vector<ScatteringResult> results;
  results.reserve(ks.size());
  for (double k : ks) {
    ScatteringResult r;
    r.k = k;
    try {
      // Edges sharing a potential share one integration.
      std::vector<JostOrigin> jost(n);
      std::vector<std::size_t> source(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t found = n;
        for (std::size_t j = 0; j < i; ++j) {
          if (graph.potentials[j] == graph.potentials[i]) {
            found = j;
            break;
          }
        }
        jost[i] = found < n ? jost[found] : jost_at_origin(graph.potentials[i], k, jost_options);
        source[i] = found;
      }

      const MMatrices m = m_matrices(jost, bc);
      r.m_plus = m.m_plus;
      r.m_minus = m.m_minus;
      r.m_minus_rcond = m.m_minus_rcond;
      r.s = scattering_matrix(m, tol);
      r.unitarity_defect = (r.s.adjoint() * r.s - eye).frobenius_norm();
    } catch (const Error& e) {
      r.status = PointStatus::Failed;
      r.error = error_code_name(e.code());
    }
    results.push_back(std::move(r));
  }
  return results;
}

DecayReport asymptotic_check(std::span<const ScatteringResult> results,
                             const BoundaryConditions& bc) {
  double k_max = 0.0;
  for (const auto& r : results)
    if (r.status == PointStatus::Ok) k_max = std::max(k_max, r.k);
  if (k_max < 100.0)
    raise(ErrorCode::InsufficientRange, "asymptotic_check: sweep must reach k >= 100");

  DecayReport report;
  report.u_hat = boundary::spectral_asymptotic_map(bc.unitary(), bc.tolerance());

  for (const auto& r : results) {
    if (r.status != PointStatus::Ok) continue;
    report.table.push_back({r.k, (r.s - report.u_hat).frobenius_norm()});
  }

  for (double target : {10.0, 100.0, 1000.0}) {
    if (target > k_max * (1.0 + 1e-12)) continue;
    const auto best = std::min_element(report.table.begin(), report.table.end(),
                                       [target](const auto& a, const auto& b) {
                                         return std::abs(a.k - target) < std::abs(b.k - target);
                                       });
    report.checkpoints.push_back(*best);
  }

  report.decreasing = report.checkpoints.size() >= 2;
  for (std::size_t i = 0; i + 1 < report.checkpoints.size(); ++i)
    if (!(report.checkpoints[i + 1].defect < report.checkpoints[i].defect ||
          report.checkpoints[i].defect < 1e-12))
      report.decreasing = false;

  report.fitted_c = 0.0;
  for (const auto& c : report.checkpoints)
    report.fitted_c = std::max(report.fitted_c, c.defect * c.k);
  if (!report.checkpoints.empty()) {
    const auto& last = report.checkpoints.back();
    report.decay_bounded = last.defect <= report.fitted_c / last.k + 1e-15;
  }
  return report;
}

}  // namespace starscatter::scattering
