#pragma once

// Brute-force spectral oracle: congruence-transform a nonsingular constant J
// to the canonical block J0, rewrite H in the canonical variables, build the
// Hamiltonian in a truncated occupation-number basis (unit reference
// frequency per mode) and diagonalize densely. Deliberately independent of
// the mode-classification path in spectra.hpp: no Williamson step, the
// physical frequencies emerge from the matrix.

#include "hamforge/core.hpp"
#include "hamforge/lagrangian.hpp"

#include <complex>
#include <vector>

namespace hamforge {

// ---------------------------------------------------------------------------
// Canonical frame
// ---------------------------------------------------------------------------

/// Real congruence S J S^T = J0 plus a conditioning report for S.
struct CanonicalFrame {
  Mat S;
  double conditioning = 0.0;
  double defect = 0.0;  // ||S J S^T - J0||_max, construction self-check
};

/// Symplectic Gram-Schmidt with norm pivoting. Row pairs (u_i, w_i) of S
/// satisfy u_i^T J w_j = delta_ij with both J-isotropic families, so
/// S J S^T = J0 exactly in exact arithmetic. For J = J0 the construction
/// returns the identity. Throws SingularPoissonMatrix below the relative
/// singular-value cutoff (the theta B = 1 degeneracy for the catalog).
inline CanonicalFrame canonicalize(const PoissonMatrix& jm) {
  const Mat& j = jm.J;
  const int dim = static_cast<int>(j.rows());
  const int n = dim / 2;
  {
    Eigen::JacobiSVD<Mat> svd(j);
    double smax = svd.singularValues().maxCoeff();
    double smin = svd.singularValues().minCoeff();
    if (smax <= 0.0 || smin < kSingularCutoff * smax)
      throw SingularPoissonMatrix(
          "Poisson matrix is singular; no canonical realization exists "
          "(smallest singular value " + format_full(smin) + ")");
  }

  std::vector<Vec> pool;
  for (int i = 0; i < dim; ++i) pool.push_back(Vec::Unit(dim, i));
  std::vector<Vec> us, ws;

  auto project_out = [&](Vec& v) {
    for (size_t t = 0; t < us.size(); ++t)
      v += (ws[t].dot(j * v)) * us[t] - (us[t].dot(j * v)) * ws[t];
  };

  for (int pair = 0; pair < n; ++pair) {
    size_t best = 0;
    double best_norm = -1.0;
    for (size_t i = 0; i < pool.size(); ++i) {
      double nv = pool[i].norm();
      if (nv > best_norm * (1.0 + 1e-12)) {
        best_norm = nv;
        best = i;
      }
    }
    Vec u = pool[best];
    pool.erase(pool.begin() + static_cast<long>(best));
    project_out(u);  // second pass keeps the pairs J-orthogonal
    u /= u.norm();

    Vec w = -(j * u);
    project_out(w);
    double pairing = u.dot(j * w);
    if (!(pairing > 0.0))
      throw SingularPoissonMatrix("symplectic pairing collapsed during "
                                  "canonicalization");
    w /= pairing;

    // balance the pair norms; the rescaling preserves u^T J w = 1 and
    // improves the conditioning of S considerably
    double alpha = std::sqrt(w.norm());
    u *= alpha;
    w /= alpha;

    for (Vec& v : pool)
      v += (w.dot(j * v)) * u - (u.dot(j * v)) * w;
    us.push_back(std::move(u));
    ws.push_back(std::move(w));
  }

  CanonicalFrame frame;
  frame.S.resize(dim, dim);
  for (int i = 0; i < n; ++i) {
    frame.S.row(i) = us[i].transpose();
    frame.S.row(n + i) = ws[i].transpose();
  }
  frame.conditioning = condition_number(frame.S);
  frame.defect = max_abs(frame.S * j * frame.S.transpose() - canonical_j(n));
  if (frame.defect > 1e-10)
    throw Error("canonical frame defect " + format_full(frame.defect) +
                " exceeds 1e-10");
  return frame;
}

// ---------------------------------------------------------------------------
// Truncated Fock operators
// ---------------------------------------------------------------------------

/// Hermitian operator on the n-mode occupation basis, cutoff quanta per mode.
struct TruncatedOperator {
  int dimension = 0;
  CMat matrix;
  int cutoff = 0;
  double hermiticity_defect = 0.0;
};

namespace detail {

/// H rewritten in canonical variables, M' = S^-T M S^-1, followed by a
/// per-mode diagonal symplectic balance q_i -> d_i q_i, p_i -> p_i / d_i
/// with d_i = (M'_qq,ii / M'_pp,ii)^(1/4). The balance leaves the brackets
/// and the spectrum untouched and keeps the occupation-basis representation
/// well conditioned when S is skewed.
inline Mat canonical_quadratic_form(const HamiltonianStructure& s,
                                    const CanonicalFrame& frame) {
  Mat sinv = Eigen::PartialPivLU<Mat>(frame.S).inverse();
  Mat mp = sinv.transpose() * s.M * sinv;
  mp = 0.5 * (mp + Mat(mp.transpose()));
  const int n = static_cast<int>(mp.rows()) / 2;
  Vec scale = Vec::Ones(2 * n);
  for (int i = 0; i < n; ++i) {
    double qq = mp(i, i), pp = mp(n + i, n + i);
    if (qq > 0.0 && pp > 0.0) {
      double d = std::pow(qq / pp, 0.25);
      scale(i) = d;
      scale(n + i) = 1.0 / d;
    }
  }
  for (int a = 0; a < 2 * n; ++a)
    for (int b = 0; b < 2 * n; ++b) mp(a, b) /= scale(a) * scale(b);
  return mp;
}

inline CMat ladder_annihilate(int cutoff) {
  CMat a = CMat::Zero(cutoff, cutoff);
  for (int k = 1; k < cutoff; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

// kron over modes, identity where no factor is given; mode 0 most significant
inline CMat kron_modes(const std::vector<const CMat*>& factors, int cutoff) {
  const int n = static_cast<int>(factors.size());
  long dim = 1;
  for (int i = 0; i < n; ++i) dim *= cutoff;
  CMat out = CMat::Zero(dim, dim);

  std::vector<long> stride(n);
  long s = 1;
  for (int m = n - 1; m >= 0; --m) {
    stride[m] = s;
    s *= cutoff;
  }
  std::vector<int> row_idx(n, 0), col_idx(n, 0);
  // iterate over all (row, col) multi-indices; factors are small and dense
  std::function<void(int, long, long, std::complex<double>)> rec =
      [&](int mode, long r, long c, std::complex<double> val) {
        if (val == std::complex<double>(0.0, 0.0)) return;
        if (mode == n) {
          out(r, c) += val;
          return;
        }
        const CMat* f = factors[mode];
        if (!f) {
          for (int k = 0; k < cutoff; ++k)
            rec(mode + 1, r + k * stride[mode], c + k * stride[mode], val);
        } else {
          for (int a = 0; a < cutoff; ++a)
            for (int b = 0; b < cutoff; ++b) {
              std::complex<double> v = (*f)(a, b);
              if (v != std::complex<double>(0.0, 0.0))
                rec(mode + 1, r + a * stride[mode], c + b * stride[mode],
                    val * v);
            }
        }
      };
  rec(0, 0, 0, std::complex<double>(1.0, 0.0));
  return out;
}

}  // namespace detail

/// Hamiltonian matrix in the truncated basis. The structure's H = x^T M x / 2
/// is rewritten in canonical variables (canonical_quadratic_form) and each
/// canonical pair is represented with unit-frequency ladder operators
/// Q = (a + a^+)/sqrt(2), P = i(a^+ - a)/sqrt(2). Operator products are
/// formed with two quanta of margin and then cut back, so the matrix is the
/// exact projection P H P onto the truncated basis and the lowest
/// eigenvalues converge variationally from above.
inline TruncatedOperator fock_hamiltonian(const HamiltonianStructure& s,
                                          const CanonicalFrame& frame,
                                          int cutoff) {
  if (cutoff < 4) throw Error("fock_hamiltonian cutoff below 4 is meaningless");
  const int dim = s.dim();
  const int n = dim / 2;

  Mat mp = detail::canonical_quadratic_form(s, frame);

  const int big = cutoff + 2;
  CMat a = detail::ladder_annihilate(big);
  CMat ad = a.adjoint();
  const std::complex<double> im(0.0, 1.0);
  CMat q_big = (a + ad) / std::sqrt(2.0);
  CMat p_big = im * (ad - a) / std::sqrt(2.0);
  CMat q1 = q_big.topLeftCorner(cutoff, cutoff);
  CMat p1 = p_big.topLeftCorner(cutoff, cutoff);

  // small per-mode factors for y_a y_b; y = (Q_1..Q_n, P_1..P_n)
  auto small_big = [&](int idx) -> const CMat& { return idx < n ? q_big : p_big; };
  auto small_cut = [&](int idx) -> const CMat& { return idx < n ? q1 : p1; };
  auto mode_of = [&](int idx) { return idx < n ? idx : idx - n; };

  long full_dim = 1;
  for (int i = 0; i < n; ++i) full_dim *= cutoff;
  CMat h = CMat::Zero(full_dim, full_dim);

  for (int ai = 0; ai < dim; ++ai)
    for (int bi = 0; bi < dim; ++bi) {
      double coeff = 0.5 * mp(ai, bi);
      if (coeff == 0.0) continue;
      std::vector<const CMat*> factors(n, nullptr);
      CMat prod;
      if (mode_of(ai) == mode_of(bi)) {
        // exact window elements of the same-mode product
        prod = CMat(small_big(ai) * small_big(bi)).topLeftCorner(cutoff, cutoff);
        factors[mode_of(ai)] = &prod;
        h += coeff * detail::kron_modes(factors, cutoff);
      } else {
        factors[mode_of(ai)] = &small_cut(ai);
        factors[mode_of(bi)] = &small_cut(bi);
        h += coeff * detail::kron_modes(factors, cutoff);
      }
    }

  TruncatedOperator op;
  op.cutoff = cutoff;
  op.dimension = static_cast<int>(full_dim);
  op.hermiticity_defect = (h - CMat(h.adjoint())).cwiseAbs().maxCoeff() /
                          std::max(1.0, h.cwiseAbs().maxCoeff());
  op.matrix = 0.5 * (h + CMat(h.adjoint()));
  return op;
}

// ---------------------------------------------------------------------------
// Oracle spectrum
// ---------------------------------------------------------------------------

struct OracleResult {
  std::vector<double> energies;  // k lowest
  double certificate = 0.0;      // max eigenvalue shift cutoff -> cutoff + 5
  int cutoff = 0;
};

/// k lowest eigenvalues with a convergence certificate: diagonalize at
/// cutoff and cutoff + 5 and require the lowest-k shift below 1e-8.
/// M must be positive definite in the canonical frame, otherwise the
/// spectrum is unbounded below and the truncation is meaningless.
inline OracleResult oracle_spectrum(const HamiltonianStructure& s, int cutoff,
                                    int k) {
  CanonicalFrame frame = canonicalize(s.J);

  Mat mp = detail::canonical_quadratic_form(s, frame);
  Eigen::SelfAdjointEigenSolver<Mat> small(mp, Eigen::EigenvaluesOnly);
  double lo = small.eigenvalues().minCoeff();
  double hi = small.eigenvalues().maxCoeff();
  if (!(lo > kSingularCutoff * std::max(hi, 1.0)))
    throw NotPositiveDefinite(
        "Hamiltonian is not positive definite in the canonical frame "
        "(lowest eigenvalue " + format_full(lo) + ")");

  auto lowest = [&](int cut) {
    TruncatedOperator op = fock_hamiltonian(s, frame, cut);
    Eigen::SelfAdjointEigenSolver<CMat> eig(op.matrix, Eigen::EigenvaluesOnly);
    std::vector<double> e(eig.eigenvalues().data(),
                          eig.eigenvalues().data() + std::min<long>(k, op.dimension));
    return e;
  };

  std::vector<double> e0 = lowest(cutoff);
  std::vector<double> e1 = lowest(cutoff + 5);
  double shift = 0.0;
  for (size_t i = 0; i < e0.size() && i < e1.size(); ++i)
    shift = std::max(shift, std::abs(e0[i] - e1[i]));

  if (!(shift < 1e-8))
    throw NoConvergence("oracle eigenvalues did not converge: lowest-" +
                            std::to_string(k) + " shift " + format_full(shift) +
                            " between cutoffs " + std::to_string(cutoff) +
                            " and " + std::to_string(cutoff + 5),
                        shift);

  OracleResult res;
  res.energies = std::move(e1);
  res.certificate = shift;
  res.cutoff = cutoff;
  return res;
}

}  // namespace hamforge
