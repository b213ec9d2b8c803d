#pragma once

// Lagrange brackets sigma and Poisson matrices J: construction from affine
// one-forms, inversion (sigma J = -I), and the structural validators
// (antisymmetry, Jacobi identity, two-form closure) with central-difference
// probes for state-dependent fields.

#include "hamforge/core.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace hamforge {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// One-form coefficients l_a(x) = A_ab x^b + c_a on a 2n-dim chart.
struct AffineOneForm {
  Mat A;
  Vec c;

  AffineOneForm() = default;
  AffineOneForm(Mat A_, Vec c_) : A(std::move(A_)), c(std::move(c_)) {
    if (A.rows() != A.cols() || A.rows() != c.size())
      throw ShapeMismatch("one-form needs square A and matching c");
  }

  Vec eval(const Vec& x) const { return A * x + c; }
  int dim() const { return static_cast<int>(A.rows()); }
};

/// Quadratic phase-space function F(x) = x^T Q x / 2 + g^T x + k, Q symmetric.
struct QuadraticObservable {
  Mat Q;
  Vec g;
  double k = 0.0;

  QuadraticObservable() = default;
  QuadraticObservable(Mat Q_, Vec g_, double k_ = 0.0)
      : Q(std::move(Q_)), g(std::move(g_)), k(k_) {
    if (Q.rows() != Q.cols() || Q.rows() != g.size())
      throw ShapeMismatch("observable needs square Q and matching g");
    if (symmetry_defect(Q) > 1e-12)
      throw SymmetryViolation("observable Q matrix is not symmetric");
    Q = 0.5 * (Q + Mat(Q.transpose()));  // scrub roundoff asymmetry
  }

  /// Pure quadratic form H(x) = x^T Q x / 2.
  static QuadraticObservable quadratic(const Mat& Q) {
    return QuadraticObservable(Q, Vec::Zero(Q.rows()), 0.0);
  }
  /// Linear coordinate functional x -> g.x.
  static QuadraticObservable linear(const Vec& g) {
    return QuadraticObservable(Mat::Zero(g.size(), g.size()), g, 0.0);
  }
  /// The i-th coordinate function on a dim-dimensional chart.
  static QuadraticObservable coordinate(int dim, int i) {
    Vec g = Vec::Zero(dim);
    g(i) = 1.0;
    return linear(g);
  }

  double eval(const Vec& x) const { return 0.5 * x.dot(Q * x) + g.dot(x) + k; }
  Vec gradient(const Vec& x) const { return Q * x + g; }
  int dim() const { return static_cast<int>(Q.rows()); }
};

/// Constant Lagrange bracket sigma_ab = l_{a,b} - l_{b,a} on a chart.
struct LagrangeBracket {
  Mat sigma;
  PhaseChart chart;

  LagrangeBracket() = default;
  LagrangeBracket(Mat sigma_, PhaseChart chart_)
      : sigma(std::move(sigma_)), chart(std::move(chart_)) {
    if (sigma.rows() != chart.dim || sigma.cols() != chart.dim)
      throw ShapeMismatch("sigma dimension does not match chart");
    if (antisymmetry_defect(sigma) > 1e-12)
      throw SymmetryViolation("Lagrange bracket matrix is not antisymmetric");
  }
};

/// Constant Poisson matrix J^ab, the negative inverse of sigma.
struct PoissonMatrix {
  Mat J;
  PhaseChart chart;

  PoissonMatrix() = default;
  PoissonMatrix(Mat J_, PhaseChart chart_)
      : J(std::move(J_)), chart(std::move(chart_)) {
    if (J.rows() != chart.dim || J.cols() != chart.dim)
      throw ShapeMismatch("J dimension does not match chart");
    if (antisymmetry_defect(J) > 1e-12)
      throw SymmetryViolation("Poisson matrix is not antisymmetric");
  }
};

using MatrixField = std::function<Mat(const Vec&)>;

struct ClosureReport {
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct JacobiReport {
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// sigma = A - A^T. The constant part c never enters: constants drop out of
/// the curl l_{a,b} - l_{b,a}.
inline LagrangeBracket sigma_from_oneform(const AffineOneForm& ell,
                                          const PhaseChart& chart) {
  if (ell.dim() != chart.dim)
    throw ShapeMismatch("one-form dimension does not match chart");
  return LagrangeBracket(ell.A - Mat(ell.A.transpose()), chart);
}

namespace detail {

// Central difference d(field)/dx_c at x, step scaled per coordinate.
inline Mat field_partial(const MatrixField& field, const Vec& x, int c,
                         double step) {
  double h = step * (1.0 + std::abs(x(c)));
  Vec xp = x, xm = x;
  xp(c) += h;
  xm(c) -= h;
  Mat fp = field(xp);
  Mat fm = field(xm);
  if (!all_finite(fp) || !all_finite(fm))
    throw EvaluationError("matrix field returned non-finite values");
  return (fp - fm) / (2.0 * h);
}

}  // namespace detail

/// Exterior-derivative check: max over sample points and index triples of
/// |sigma_{ab,c} + sigma_{bc,a} + sigma_{ca,b}|. Constant fields give an
/// exactly zero residual.
inline ClosureReport check_closure(const MatrixField& sigma_field,
                                   const std::vector<Vec>& sample_points,
                                   double step = 1e-5, double tol = 1e-6) {
  if (step <= 0.0) throw Error("check_closure requires step > 0");
  ClosureReport report;
  report.tol = tol;
  for (const Vec& x : sample_points) {
    const int dim = static_cast<int>(x.size());
    std::vector<Mat> d(dim);
    for (int c = 0; c < dim; ++c)
      d[c] = detail::field_partial(sigma_field, x, c, step);
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b)
        for (int c = b + 1; c < dim; ++c) {
          double r = std::abs(d[c](a, b) + d[a](b, c) + d[b](c, a));
          report.max_residual = std::max(report.max_residual, r);
        }
  }
  report.pass = report.max_residual <= tol;
  return report;
}

/// Jacobi identity check: max residual of
/// J^{ab},_d J^{dc} + J^{bc},_d J^{da} + J^{ca},_d J^{db} over samples and
/// triples. Constant fields give an exactly zero residual.
inline JacobiReport check_jacobi(const MatrixField& j_field,
                                 const std::vector<Vec>& sample_points,
                                 double step = 1e-5, double tol = 1e-6) {
  if (step <= 0.0) throw Error("check_jacobi requires step > 0");
  JacobiReport report;
  report.tol = tol;
  for (const Vec& x : sample_points) {
    const int dim = static_cast<int>(x.size());
    Mat j = j_field(x);
    if (!all_finite(j)) throw EvaluationError("J field returned non-finite values");
    std::vector<Mat> d(dim);
    for (int c = 0; c < dim; ++c)
      d[c] = detail::field_partial(j_field, x, c, step);
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b)
        for (int c = b + 1; c < dim; ++c) {
          double s = 0.0;
          for (int e = 0; e < dim; ++e)
            s += d[e](a, b) * j(e, c) + d[e](b, c) * j(e, a) +
                 d[e](c, a) * j(e, b);
          report.max_residual = std::max(report.max_residual, std::abs(s));
        }
  }
  report.pass = report.max_residual <= tol;
  return report;
}

/// J from sigma J = -I. One Newton refinement pass keeps the residual at the
/// noise floor even for conditioning up to ~1e8. Throws SingularSigma below
/// the relative singular-value cutoff; reports cond(sigma) on request.
inline PoissonMatrix invert_sigma(const LagrangeBracket& sigma,
                                  double* condition_out = nullptr) {
  const Mat& s = sigma.sigma;
  Eigen::JacobiSVD<Mat> svd(s);
  double smax = svd.singularValues().maxCoeff();
  double smin = svd.singularValues().minCoeff();
  if (condition_out)
    *condition_out = smin > 0.0 ? smax / smin
                                : std::numeric_limits<double>::infinity();
  if (smax <= 0.0 || smin < kSingularCutoff * smax)
    throw SingularSigma("Lagrange bracket is singular (degenerate Lagrangian): "
                        "smallest singular value " + format_full(smin));

  Mat j = Eigen::PartialPivLU<Mat>(-s).inverse();
  j = 2.0 * j + j * s * j;             // one Newton step squares the residual
  j = 0.5 * (j - Mat(j.transpose()));  // exact antisymmetry
  return PoissonMatrix(j, sigma.chart);
}

/// Poisson bracket [F, G](x) = grad(F)^T J grad(G).
inline double poisson_bracket(const QuadraticObservable& f,
                              const QuadraticObservable& g,
                              const PoissonMatrix& j, const Vec& x) {
  if (f.dim() != j.chart.dim || g.dim() != j.chart.dim ||
      x.size() != j.chart.dim)
    throw ShapeMismatch("poisson_bracket operands do not match chart");
  return f.gradient(x).dot(j.J * g.gradient(x));
}

/// Orthonormal basis of ker(J). Each k gives a linear Casimir k.x conserved
/// under any flow x' = J grad(H). Empty for nonsingular J.
inline std::vector<Vec> casimir_basis(const PoissonMatrix& j,
                                      double tol = kSingularCutoff) {
  Eigen::JacobiSVD<Mat> svd(j.J, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  double smax = sv.size() ? sv.maxCoeff() : 0.0;
  std::vector<Vec> basis;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < tol * std::max(smax, 1e-300))
      basis.push_back(svd.matrixV().col(i));
  return basis;
}

}  // namespace hamforge
