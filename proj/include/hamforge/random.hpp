#pragma once

// Deterministic random model / one-form generators shared by the CLI's
// --random sweeps and by the property tests. Raw mt19937_64 output is mapped
// to doubles directly so streams do not depend on the standard library's
// distribution implementations.

#include "hamforge/brackets.hpp"
#include "hamforge/core.hpp"
#include "hamforge/dynamics.hpp"
#include "hamforge/lagrangian.hpp"

#include <random>

namespace hamforge {

/// Uniform double in [-1, 1) from raw engine output.
inline double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

inline Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  Mat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = uniform_pm1(rng);
  return a;
}

inline Vec random_vector(std::mt19937_64& rng, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform_pm1(rng);
  return v;
}

/// Well-conditioned random model: T symmetric positive definite with spectrum
/// in roughly [0.6, 2], Theta/V generic with O(1) entries. Draws are rejected
/// until the flow's spectral radius stays below 10; with stable_only set,
/// also until the spectrum is purely imaginary (bounded trajectories, the
/// regime where absolute trajectory tolerances are meaningful).
inline QuadraticModel random_model(std::mt19937_64& rng, int n,
                                   bool force_v_equals_t = false,
                                   bool stable_only = false) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Mat a = random_matrix(rng, n, n);
    Mat t = 0.4 * (a * a.transpose()) / n + 0.6 * Mat::Identity(n, n);
    Mat b = random_matrix(rng, n, n);
    Mat theta = 0.5 * (b - b.transpose());
    Mat v;
    if (force_v_equals_t) {
      v = t;
    } else {
      Mat c = random_matrix(rng, n, n);
      v = 0.5 * (c + c.transpose());
    }
    QuadraticModel m = build_model(t, theta, v);
    CVec ev = Eigen::EigenSolver<Mat>(flow_matrix(build_structure_qu(m)))
                  .eigenvalues();
    if (ev.cwiseAbs().maxCoeff() >= 10.0) continue;
    if (stable_only && ev.real().cwiseAbs().maxCoeff() > 1e-8) continue;
    return m;
  }
  throw Error("random_model rejection loop exhausted");
}

/// Random affine one-form whose curl is almost surely nonsingular.
inline AffineOneForm random_oneform(std::mt19937_64& rng, int dim) {
  return AffineOneForm(random_matrix(rng, dim, dim), random_vector(rng, dim));
}

}  // namespace hamforge
