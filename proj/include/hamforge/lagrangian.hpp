#pragma once

// Builders for the quadratic second-order model T q'' - Theta q' + V q = 0
// and its first-order Hamiltonian presentations on the {q,u}, {q,p} and
// {q,v} charts, plus the variable maps linking the charts.
//
// Sign conventions used throughout (verified against the flow itself, see
// tests): epsilon(0,1) = +1, sigma J = -I, x' = J grad(H). On the {q,u}
// chart these force [u_i, u_j] = +(T^-1 Theta T^-1)_ij; with the opposite
// sign the chart would integrate the time-reversed gyroscopic term and the
// three charts would stop being solution-equivalent.

#include "hamforge/brackets.hpp"
#include "hamforge/core.hpp"

#include <optional>

namespace hamforge {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Constant-coefficient model: T symmetric (kinetic), Theta antisymmetric
/// (gyroscopic), V symmetric (potential), all n x n.
struct QuadraticModel {
  int n = 0;
  Mat T;
  Mat Theta;
  Mat V;
};

/// First-order Lagrangian L = l_a(x) x'^a + l_0(x) with H = -l_0.
struct FirstOrderLagrangian {
  PhaseChart chart;
  AffineOneForm oneform;
  QuadraticObservable hamiltonian;
};

enum class Provenance { qu, qp, qv, custom };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::qu: return "qu";
    case Provenance::qp: return "qp";
    case Provenance::qv: return "qv";
    default: return "custom";
  }
}

/// Constant Poisson matrix J plus quadratic Hamiltonian H = x^T M x / 2.
/// For constant J the Jacobi identity holds identically.
struct HamiltonianStructure {
  PhaseChart chart;
  PoissonMatrix J;
  Mat M;
  Provenance provenance = Provenance::custom;
  std::optional<FirstOrderLagrangian> lagrangian;

  QuadraticObservable hamiltonian() const {
    return QuadraticObservable::quadratic(M);
  }
  double energy(const Vec& x) const { return 0.5 * x.dot(M * x); }
  int dim() const { return chart.dim; }
};

// ---------------------------------------------------------------------------
// Model construction
// ---------------------------------------------------------------------------

inline QuadraticModel build_model(const Mat& T, const Mat& Theta, const Mat& V) {
  if (T.rows() != T.cols() || Theta.rows() != Theta.cols() ||
      V.rows() != V.cols() || T.rows() != Theta.rows() || T.rows() != V.rows())
    throw ShapeMismatch("model matrices must be square and equally sized");
  if (symmetry_defect(T) > 1e-12)
    throw SymmetryViolation("T is not symmetric");
  if (antisymmetry_defect(Theta) > 1e-12)
    throw SymmetryViolation("Theta is not antisymmetric");
  if (symmetry_defect(V) > 1e-12)
    throw SymmetryViolation("V is not symmetric");
  QuadraticModel m;
  m.n = static_cast<int>(T.rows());
  m.T = 0.5 * (T + Mat(T.transpose()));
  m.Theta = 0.5 * (Theta - Mat(Theta.transpose()));
  m.V = 0.5 * (V + Mat(V.transpose()));
  return m;
}

/// Equation-of-motion residual T q'' - Theta q' + V q; zero on solutions.
inline Vec second_order_residual(const QuadraticModel& m, const Vec& q,
                                 const Vec& qdot, const Vec& qddot) {
  if (q.size() != m.n || qdot.size() != m.n || qddot.size() != m.n)
    throw ShapeMismatch("state vectors must have length n");
  return m.T * qddot - m.Theta * qdot + m.V * q;
}

namespace detail {

inline Mat inverse_of_t(const QuadraticModel& m) {
  Eigen::JacobiSVD<Mat> svd(m.T);
  double smax = svd.singularValues().maxCoeff();
  double smin = svd.singularValues().minCoeff();
  if (smax <= 0.0 || smin < kSingularCutoff * smax)
    throw SingularT("kinetic matrix T is singular");
  return Eigen::PartialPivLU<Mat>(m.T).inverse();
}

inline void require_v_equals_t(const QuadraticModel& m) {
  double scale = std::max(max_abs(m.T), 1.0);
  if (max_abs(m.V - m.T) / scale > 1e-12)
    throw RequiresVEqualsT("the {q,v} structure needs V = T");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Variable maps between charts
// ---------------------------------------------------------------------------

/// Canonical momentum p = T qdot - Theta q / 2.
inline Vec momentum_map(const QuadraticModel& m, const Vec& q, const Vec& qdot) {
  detail::inverse_of_t(m);  // reject singular T
  return m.T * qdot - 0.5 * m.Theta * q;
}

/// Inverse of momentum_map: qdot = T^-1 (p + Theta q / 2).
inline Vec velocity_map(const QuadraticModel& m, const Vec& q, const Vec& p) {
  Mat tinv = detail::inverse_of_t(m);
  return tinv * (p + 0.5 * m.Theta * q);
}

/// {q,v}-chart auxiliary variable with matching initial velocity:
/// qdot = T^-1 Theta q + T^-1 v  =>  v = T qdot - Theta q. Requires V = T.
inline Vec v_map(const QuadraticModel& m, const Vec& q, const Vec& qdot) {
  detail::require_v_equals_t(m);
  detail::inverse_of_t(m);
  return m.T * qdot - m.Theta * q;
}

// ---------------------------------------------------------------------------
// Structure builders
// ---------------------------------------------------------------------------

/// {q,u} chart, u = qdot. Brackets [q,u] = T^-1, [u,u] = T^-1 Theta T^-1,
/// H = (T u.u + V q.q)/2. Also carries the first-order Lagrangian
/// L = (T u - Theta q / 2).q' - H whose curl reproduces this J.
inline HamiltonianStructure build_structure_qu(const QuadraticModel& m) {
  Mat tinv = detail::inverse_of_t(m);
  const int n = m.n;
  PhaseChart chart = PhaseChart::paired(n, "u");

  Mat j = block2(Mat::Zero(n, n), tinv, -tinv, tinv * m.Theta * tinv);
  Mat mm = block2(m.V, Mat::Zero(n, n), Mat::Zero(n, n), m.T);

  Mat a = Mat::Zero(2 * n, 2 * n);
  a.block(0, 0, n, n) = -0.5 * m.Theta;
  a.block(0, n, n, n) = m.T;

  HamiltonianStructure s;
  s.chart = chart;
  s.J = PoissonMatrix(j, chart);
  s.M = mm;
  s.provenance = Provenance::qu;
  s.lagrangian = FirstOrderLagrangian{
      chart, AffineOneForm(a, Vec::Zero(2 * n)),
      QuadraticObservable::quadratic(mm)};
  return s;
}

/// Canonical {q,p} chart. H = (p + Theta q / 2)^T T^-1 (p + Theta q / 2)/2
/// + q^T V q / 2, expanded to a symmetric M.
inline HamiltonianStructure build_structure_qp(const QuadraticModel& m) {
  Mat tinv = detail::inverse_of_t(m);
  const int n = m.n;
  PhaseChart chart = PhaseChart::paired(n, "p");

  Mat thT = m.Theta.transpose();
  Mat mm = block2(m.V + 0.25 * thT * tinv * m.Theta, 0.5 * thT * tinv,
                  0.5 * tinv * m.Theta, tinv);
  mm = 0.5 * (mm + Mat(mm.transpose()));

  Mat a = Mat::Zero(2 * n, 2 * n);
  a.block(0, n, n, n) = Mat::Identity(n, n);  // L = p.q' - H

  HamiltonianStructure s;
  s.chart = chart;
  s.J = PoissonMatrix(canonical_j(n), chart);
  s.M = mm;
  s.provenance = Provenance::qp;
  s.lagrangian = FirstOrderLagrangian{
      chart, AffineOneForm(a, Vec::Zero(2 * n)),
      QuadraticObservable::quadratic(mm)};
  return s;
}

/// {q,v} chart for the special case V = T: noncommuting coordinates,
/// [q,q] = T^-1 Theta T^-1, [q,v] = I, [v,v] = 0,
/// H = (T^-1 v.v + T q.q)/2. Lagrangian L = v.q' + v^T W v'/2 - H with
/// W = T^-1 Theta T^-1.
inline HamiltonianStructure build_structure_qv(const QuadraticModel& m) {
  detail::require_v_equals_t(m);
  Mat tinv = detail::inverse_of_t(m);
  const int n = m.n;
  PhaseChart chart = PhaseChart::paired(n, "v");

  Mat w = tinv * m.Theta * tinv;
  Mat j = block2(w, Mat::Identity(n, n), -Mat::Identity(n, n), Mat::Zero(n, n));
  Mat mm = block2(m.T, Mat::Zero(n, n), Mat::Zero(n, n), tinv);

  Mat a = Mat::Zero(2 * n, 2 * n);
  a.block(0, n, n, n) = Mat::Identity(n, n);
  a.block(n, n, n, n) = -0.5 * w;

  HamiltonianStructure s;
  s.chart = chart;
  s.J = PoissonMatrix(j, chart);
  s.M = mm;
  s.provenance = Provenance::qv;
  s.lagrangian = FirstOrderLagrangian{
      chart, AffineOneForm(a, Vec::Zero(2 * n)),
      QuadraticObservable::quadratic(mm)};
  return s;
}

/// Fully noncommutative oscillator chart: [q,q] = theta eps, [q,v] = I,
/// [v,v] = B eps, H = (v^2 + omega^2 q^2)/2. det J = (1 - theta B)^2, so the
/// bracket degenerates exactly at theta B = 1; the builder permits that and
/// leaves rejection to downstream operations.
inline HamiltonianStructure build_structure_nc(double omega, double theta,
                                               double B) {
  PhaseChart chart = PhaseChart::paired(2, "v");
  Mat e = eps2();
  Mat j = block2(theta * e, Mat::Identity(2, 2), -Mat::Identity(2, 2), B * e);
  Vec diag(4);
  diag << omega * omega, omega * omega, 1.0, 1.0;
  Mat mm = diag.asDiagonal();

  HamiltonianStructure s;
  s.chart = chart;
  s.J = PoissonMatrix(j, chart);
  s.M = mm;
  s.provenance = Provenance::qv;
  double det = (1.0 - theta * B) * (1.0 - theta * B);
  if (det > 0.0) {
    // generic one-form A = sigma/2 reproduces sigma = -J^-1
    Mat sigma = -Eigen::PartialPivLU<Mat>(j).inverse();
    sigma = 0.5 * (sigma - Mat(sigma.transpose()));
    s.lagrangian = FirstOrderLagrangian{
        chart, AffineOneForm(0.5 * sigma, Vec::Zero(4)),
        QuadraticObservable::quadratic(mm)};
  }
  return s;
}

}  // namespace hamforge
