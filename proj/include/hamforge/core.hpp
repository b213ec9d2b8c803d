#pragma once

// Shared numeric primitives: phase-space charts, error taxonomy, matrix
// predicates and tolerances used by every other header.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hamforge {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for all domain errors thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SymmetryViolation : public Error {
 public:
  using Error::Error;
};
class SingularSigma : public Error {
 public:
  using Error::Error;
};
class SingularT : public Error {
 public:
  using Error::Error;
};
class RequiresVEqualsT : public Error {
 public:
  using Error::Error;
};
class SingularPoissonMatrix : public Error {
 public:
  using Error::Error;
};
class UnstableSpectrum : public Error {
 public:
  using Error::Error;
};
class NegativeModeFrequency : public Error {
 public:
  using Error::Error;
};
class RealizationDomain : public Error {
 public:
  using Error::Error;
};
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};
class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& msg, double shift)
      : Error(msg), shift_(shift) {}
  double shift() const { return shift_; }

 private:
  double shift_ = 0.0;
};
class NonFiniteState : public Error {
 public:
  using Error::Error;
};
class EvaluationError : public Error {
 public:
  using Error::Error;
};
/// Malformed input documents (JSON syntax or schema); maps to exit code 1.
class ParseError : public Error {
 public:
  using Error::Error;
};
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Phase chart
// ---------------------------------------------------------------------------

/// Labeled coordinate system on a 2n-dimensional phase space.
struct PhaseChart {
  int dim = 0;                      // always even, = 2n
  std::vector<std::string> labels;  // one per coordinate, all distinct

  PhaseChart() = default;
  PhaseChart(int dim_, std::vector<std::string> labels_)
      : dim(dim_), labels(std::move(labels_)) {
    validate();
  }

  int n() const { return dim / 2; }

  void validate() const {
    if (dim <= 0 || dim % 2 != 0)
      throw ShapeMismatch("phase chart dimension must be positive and even, got " +
                          std::to_string(dim));
    if (static_cast<int>(labels.size()) != dim)
      throw ShapeMismatch("phase chart needs " + std::to_string(dim) +
                          " labels, got " + std::to_string(labels.size()));
    for (size_t i = 0; i < labels.size(); ++i)
      for (size_t j = i + 1; j < labels.size(); ++j)
        if (labels[i] == labels[j])
          throw ShapeMismatch("duplicate coordinate label '" + labels[i] + "'");
  }

  /// Chart (q1..qn, <aux>1..<aux>n) for a given auxiliary-variable symbol.
  static PhaseChart paired(int n, const std::string& aux) {
    std::vector<std::string> lab;
    lab.reserve(2 * n);
    for (int i = 1; i <= n; ++i) lab.push_back("q" + std::to_string(i));
    for (int i = 1; i <= n; ++i) lab.push_back(aux + std::to_string(i));
    return PhaseChart(2 * n, std::move(lab));
  }
};

// ---------------------------------------------------------------------------
// Matrix helpers
// ---------------------------------------------------------------------------

/// 2x2 antisymmetric unit, orientation eps(0,1) = +1.
inline Mat eps2() {
  Mat e(2, 2);
  e << 0.0, 1.0, -1.0, 0.0;
  return e;
}

inline double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

/// ||A - A^T||_max / max(||A||_max, 1) — zero for exactly symmetric input.
inline double symmetry_defect(const Mat& a) {
  double scale = std::max(max_abs(a), 1.0);
  return max_abs(a - a.transpose()) / scale;
}

/// ||A + A^T||_max / max(||A||_max, 1) — zero for exactly antisymmetric input.
inline double antisymmetry_defect(const Mat& a) {
  double scale = std::max(max_abs(a), 1.0);
  return max_abs(a + a.transpose()) / scale;
}

inline bool all_finite(const Mat& a) { return a.allFinite(); }
inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Ratio of extreme singular values; inf when numerically singular.
inline double condition_number(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

/// Standard canonical block J0 = [[0, I], [-I, 0]] on 2n dimensions.
inline Mat canonical_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.block(0, n, n, n) = Mat::Identity(n, n);
  j.block(n, 0, n, n) = -Mat::Identity(n, n);
  return j;
}

/// Assemble [[A, B], [C, D]] from equally sized n x n blocks.
inline Mat block2(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
  const auto n = a.rows();
  Mat m(2 * n, 2 * n);
  m.block(0, 0, n, n) = a;
  m.block(0, n, n, n) = b;
  m.block(n, 0, n, n) = c;
  m.block(n, n, n, n) = d;
  return m;
}

/// printf "%.17g" — full double precision for reports and CSV columns.
inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

/// Hausdorff-style distance between the eigenvalue multisets of two equally
/// sized matrices, via greedy nearest matching. Robust against sign noise in
/// near-zero real parts, where a lexicographic sort mispairs.
inline double eigenvalue_multiset_distance(const Mat& a, const Mat& b) {
  Eigen::EigenSolver<Mat> ea(a), eb(b);
  std::vector<std::complex<double>> va(ea.eigenvalues().data(),
                                       ea.eigenvalues().data() + a.rows());
  std::vector<std::complex<double>> vb(eb.eigenvalues().data(),
                                       eb.eigenvalues().data() + b.rows());
  std::vector<bool> used(vb.size(), false);
  double worst = 0.0;
  for (const auto& x : va) {
    double best = std::numeric_limits<double>::infinity();
    size_t best_i = 0;
    for (size_t i = 0; i < vb.size(); ++i) {
      if (used[i]) continue;
      double d = std::abs(x - vb[i]);
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    used[best_i] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

constexpr double kSingularCutoff = 1e-12;  // relative singular-value floor

}  // namespace hamforge
