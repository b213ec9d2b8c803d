#pragma once

// Quantum spectra of quadratic Hamiltonians with constant commutator matrix
// [x^a, x^b] = i J^ab: normal-mode extraction and classification from
// K = J M, closed-form level enumeration, and the named scenario catalog
// (Landau charts, the noncommutative-oscillator structures H1, H2 and the
// fully noncommutative chart).

#include "hamforge/core.hpp"
#include "hamforge/dynamics.hpp"
#include "hamforge/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace hamforge {

// ---------------------------------------------------------------------------
// Modes and spectra
// ---------------------------------------------------------------------------

enum class ModeKind { oscillator, degeneracy_pair, shear, runaway };

inline const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::oscillator: return "oscillator";
    case ModeKind::degeneracy_pair: return "degeneracy_pair";
    case ModeKind::shear: return "shear";
    default: return "runaway";
  }
}

struct NormalMode {
  ModeKind kind = ModeKind::oscillator;
  double omega = 0.0;  // rad/time; 0 unless oscillator
  int multiplicity = 1;
};

struct Level {
  double energy = 0.0;
  int degeneracy = 1;             // finite part; see infinite_degeneracy
  std::vector<int> quanta;        // representative occupation numbers
};

struct ModeSpectrum {
  std::vector<NormalMode> modes;
  double ground_energy = 0.0;
  std::vector<Level> levels;       // sorted ascending
  bool infinite_degeneracy = false;  // a degeneracy_pair mode is present
};

// ---------------------------------------------------------------------------
// Normal-mode classification
// ---------------------------------------------------------------------------

/// Eigenstructure of K = J M. Pure-imaginary pairs +-(i omega) become
/// oscillators; zero eigenvalues split into degeneracy pairs (complete
/// eigenvectors) and shear modes (Jordan blocks, e.g. free translation);
/// anything with a real part is a runaway. Requires nonsingular J.
inline std::vector<NormalMode> normal_modes(const HamiltonianStructure& s,
                                            double zero_tol = 1e-9) {
  {
    Eigen::JacobiSVD<Mat> svd(s.J.J);
    double smax = svd.singularValues().maxCoeff();
    double smin = svd.singularValues().minCoeff();
    if (smax <= 0.0 || smin < kSingularCutoff * smax)
      throw SingularPoissonMatrix(
          "Poisson matrix is singular; oscillator spectrum undefined");
  }
  Mat k = flow_matrix(s);
  Eigen::JacobiSVD<Mat> ksvd(k);
  double knorm = ksvd.singularValues().maxCoeff();

  std::vector<NormalMode> modes;
  if (knorm <= 0.0) {
    // K = 0: every conjugate coordinate pair is a flat direction.
    modes.push_back({ModeKind::degeneracy_pair, 0.0, s.dim() / 2});
    return modes;
  }

  Eigen::EigenSolver<Mat> eig(k);
  CVec ev = eig.eigenvalues();
  double ev_max = ev.cwiseAbs().maxCoeff();
  // Defective zeros (Jordan blocks) perturb eigenvalues at the sqrt(eps)
  // scale, so the zero threshold carries a noise floor on top of the
  // relative tolerance.
  const double tol = std::max(zero_tol * ev_max, 1e-7 * knorm);

  int n_zero = 0;
  int n_runaway_half = 0;
  std::vector<double> omegas;
  for (int i = 0; i < ev.size(); ++i) {
    std::complex<double> v = ev(i);
    if (std::abs(v) <= tol) {
      ++n_zero;
    } else if (std::abs(v.real()) > tol) {
      ++n_runaway_half;
    } else if (v.imag() > 0.0) {
      omegas.push_back(v.imag());
    }
  }

  std::sort(omegas.begin(), omegas.end());
  for (size_t i = 0; i < omegas.size();) {
    size_t j = i + 1;
    while (j < omegas.size() && omegas[j] - omegas[i] <= tol) ++j;
    double mean = 0.0;
    for (size_t t = i; t < j; ++t) mean += omegas[t];
    mean /= static_cast<double>(j - i);
    modes.push_back({ModeKind::oscillator, mean, static_cast<int>(j - i)});
    i = j;
  }

  if (n_zero > 0) {
    // geometric multiplicity of the zero eigenvalue = dim ker K
    int rank = 0;
    for (int i = 0; i < ksvd.singularValues().size(); ++i)
      if (ksvd.singularValues()(i) > zero_tol * knorm) ++rank;
    int geometric = s.dim() - rank;
    int shear = n_zero - geometric;      // defective directions (2-blocks)
    int pairs = (geometric - shear) / 2;
    if (shear > 0) modes.push_back({ModeKind::shear, 0.0, shear});
    if (pairs > 0) modes.push_back({ModeKind::degeneracy_pair, 0.0, pairs});
  }
  if (n_runaway_half > 0)
    modes.push_back({ModeKind::runaway, 0.0, n_runaway_half / 2});
  return modes;
}

// ---------------------------------------------------------------------------
// Level enumeration
// ---------------------------------------------------------------------------

namespace detail {

inline void merge_levels(std::vector<Level>& levels, double resolution = 1e-10) {
  std::sort(levels.begin(), levels.end(),
            [](const Level& a, const Level& b) { return a.energy < b.energy; });
  std::vector<Level> merged;
  for (const Level& l : levels) {
    double res = resolution * std::max(1.0, std::abs(l.energy));
    if (!merged.empty() && l.energy - merged.back().energy <= res) {
      merged.back().degeneracy += l.degeneracy;
    } else {
      merged.push_back(l);
    }
  }
  levels = std::move(merged);
}

}  // namespace detail

/// E(n) = sum_k omega_k (n_k + 1/2) enumerated over total quanta <= cap,
/// levels merged at 1e-10 resolution. Degeneracy pairs contribute an
/// infinite-degeneracy annotation and no energy. Throws UnstableSpectrum
/// when runaway or shear modes make the spectrum non-discrete.
inline ModeSpectrum closed_form_levels(const std::vector<NormalMode>& modes,
                                       int max_quanta) {
  ModeSpectrum spec;
  spec.modes = modes;
  std::vector<double> omegas;
  for (const NormalMode& m : modes) {
    switch (m.kind) {
      case ModeKind::oscillator:
        for (int i = 0; i < m.multiplicity; ++i) omegas.push_back(m.omega);
        break;
      case ModeKind::degeneracy_pair:
        spec.infinite_degeneracy = true;
        break;
      default:
        throw UnstableSpectrum(
            "runaway or shear modes present: spectrum is not discrete");
    }
  }
  double ground = 0.0;
  for (double w : omegas) ground += 0.5 * w;
  spec.ground_energy = ground;

  std::vector<int> quanta(omegas.size(), 0);
  std::vector<Level> raw;
  // enumerate all occupation vectors with sum <= max_quanta
  std::function<void(size_t, int, double)> rec = [&](size_t mode, int left,
                                                     double energy) {
    if (mode == omegas.size()) {
      raw.push_back({energy, 1, quanta});
      return;
    }
    for (int n = 0; n <= left; ++n) {
      quanta[mode] = n;
      rec(mode + 1, left - n, energy + n * omegas[mode]);
    }
    quanta[mode] = 0;
  };
  if (omegas.empty()) {
    if (max_quanta >= 0) raw.push_back({ground, 1, {}});
  } else {
    rec(0, max_quanta, ground);
  }
  detail::merge_levels(raw);
  spec.levels = std::move(raw);
  return spec;
}

// ---------------------------------------------------------------------------
// Scenario parameters and closed forms
// ---------------------------------------------------------------------------

/// Charged planar particle in a uniform transverse magnetic field.
struct LandauParams {
  double m = 1.0;   // mass
  double e = 1.0;   // charge
  double B = 1.0;   // field strength
  double p3 = 0.0;  // conserved out-of-plane momentum (constant energy offset)
};

/// Oscillator with deformed brackets; theta deforms coordinates, B momenta.
struct NCParams {
  double omega = 1.0;
  double theta = 0.0;
  double B = 0.0;
};

/// Landau levels E_l = p3^2/(2m) + omega0 (l + 1/2), omega0 = |e B| / m,
/// each infinitely degenerate.
inline ModeSpectrum landau_levels(const LandauParams& p, int l_max) {
  if (p.m <= 0.0) throw Error("landau_levels requires m > 0");
  if (p.B == 0.0) throw Error("landau_levels requires B != 0");
  double omega0 = std::abs(p.e * p.B) / p.m;
  double offset = p.p3 * p.p3 / (2.0 * p.m);

  ModeSpectrum spec;
  spec.modes.push_back({ModeKind::oscillator, omega0, 1});
  spec.modes.push_back({ModeKind::degeneracy_pair, 0.0, 1});
  spec.infinite_degeneracy = true;
  spec.ground_energy = offset + 0.5 * omega0;
  for (int l = 0; l <= l_max; ++l)
    spec.levels.push_back({offset + omega0 * (l + 0.5), 1, {l}});
  return spec;
}

struct H1Closed {
  double lambda = 0.0;   // B + theta omega^2
  double Omega = 0.0;    // sqrt(omega^2 + (B - theta omega^2)^2 / 4)
  double omega_minus = 0.0;
  double omega_plus = 0.0;
};

inline H1Closed h1_frequencies(const NCParams& p) {
  H1Closed c;
  c.lambda = p.B + p.theta * p.omega * p.omega;
  double d = p.B - p.theta * p.omega * p.omega;
  c.Omega = std::sqrt(p.omega * p.omega + 0.25 * d * d);
  c.omega_minus = c.Omega - 0.5 * c.lambda;
  c.omega_plus = c.Omega + 0.5 * c.lambda;
  return c;
}

/// Closed-form H1 level table E_{n,l} = Omega (2n + l + 1) - l lambda / 2
/// over the radial index n and angular index l >= 0. (With the Laguerre
/// radial index the level of the polar-coordinate solution carries 2n, which
/// is what the mode enumeration sum_k omega_k (n_k + 1/2) reproduces; the two
/// mode frequencies are Omega -+ lambda/2.) Requires Omega > lambda/2 so
/// both frequencies are positive.
inline ModeSpectrum h1_levels(const NCParams& p, int n_max, int l_max) {
  H1Closed c = h1_frequencies(p);
  if (!(c.Omega > 0.5 * c.lambda))
    throw NegativeModeFrequency(
        "Omega <= lambda/2: a mode frequency is not positive (Omega = " +
        format_full(c.Omega) + ", lambda = " + format_full(c.lambda) + ")");

  ModeSpectrum spec;
  spec.modes.push_back({ModeKind::oscillator, c.omega_minus, 1});
  spec.modes.push_back({ModeKind::oscillator, c.omega_plus, 1});
  spec.ground_energy = c.Omega;  // (omega_- + omega_+)/2
  for (int n = 0; n <= n_max; ++n)
    for (int l = 0; l <= l_max; ++l)
      spec.levels.push_back(
          {c.Omega * (2 * n + l + 1) - 0.5 * l * c.lambda, 1, {n, l}});
  detail::merge_levels(spec.levels);
  return spec;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

inline QuadraticModel landau_model(const LandauParams& p) {
  return build_model(p.m * Mat::Identity(2, 2), p.e * p.B * eps2(),
                     Mat::Zero(2, 2));
}

/// Second-order model equivalent to the noncommutative-oscillator flow:
/// q'' = (B + theta omega^2) eps q' - (1 - B theta) omega^2 q.
inline QuadraticModel nc_model(const NCParams& p) {
  double lambda = p.B + p.theta * p.omega * p.omega;
  double kappa = (1.0 - p.B * p.theta) * p.omega * p.omega;
  return build_model(Mat::Identity(2, 2), lambda * eps2(),
                     kappa * Mat::Identity(2, 2));
}

/// H2 structure: a second inequivalent bracket for the same flow, with
/// noncommuting coordinates. det J = (1 - theta B)^2.
inline HamiltonianStructure catalog_nc_h2(const NCParams& p) {
  double w2 = p.omega * p.omega;
  double a = 1.0 + p.theta * p.theta * w2;
  double b = p.theta * p.theta * p.theta * w2 * w2 + 2.0 * p.theta * w2 + p.B;
  Mat e = eps2();
  Mat j = block2(p.theta * e, a * Mat::Identity(2, 2),
                 -a * Mat::Identity(2, 2), b * e);
  Mat m = block2(w2 * a * Mat::Identity(2, 2), w2 * p.theta * e,
                 -w2 * p.theta * e, Mat::Identity(2, 2));

  HamiltonianStructure s;
  s.chart = PhaseChart::paired(2, "u");
  s.J = PoissonMatrix(j, s.chart);
  s.M = m;
  s.provenance = Provenance::custom;
  return s;
}

inline HamiltonianStructure catalog(const std::string& name,
                                    const LandauParams& lp,
                                    const NCParams& np) {
  if (name == "landau_qp") return build_structure_qp(landau_model(lp));
  if (name == "landau_qu") return build_structure_qu(landau_model(lp));
  if (name == "nc_h1") return build_structure_qu(nc_model(np));
  if (name == "nc_h2") return catalog_nc_h2(np);
  if (name == "nc_np") return build_structure_nc(np.omega, np.theta, np.B);
  throw Error("unknown catalog entry '" + name + "'");
}

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {
      "landau_qp", "landau_qu", "nc_h1", "nc_h2", "nc_np"};
  return names;
}

// ---------------------------------------------------------------------------
// H2 canonical realization
// ---------------------------------------------------------------------------

/// Canonical-variable realization of the H2 brackets, valid for theta > 0
/// and B theta > 1:
///   q1 = sqrt(theta) x1, q2 = sqrt(theta) p1,
///   u1 = s x2 + c p1,    u2 = s p2 - c x1,
/// with s = sqrt((theta B - 1)/theta), c = (1 + theta^2 omega^2)/sqrt(theta).
struct H2Realization {
  Mat map;                           // columns act on y = (x1, x2, p1, p2)
  HamiltonianStructure transformed;  // (J0, M) encoding 2 theta H2
};

inline H2Realization h2_realization(const NCParams& p) {
  if (!(p.theta > 0.0) || !(p.B * p.theta > 1.0))
    throw RealizationDomain(
        "H2 realization needs theta > 0 and B theta > 1 (got theta = " +
        format_full(p.theta) + ", B theta = " + format_full(p.B * p.theta) + ")");
  double rt = std::sqrt(p.theta);
  double s = std::sqrt((p.theta * p.B - 1.0) / p.theta);
  double c = (1.0 + p.theta * p.theta * p.omega * p.omega) / rt;

  Mat r = Mat::Zero(4, 4);  // rows: q1, q2, u1, u2; cols: x1, x2, p1, p2
  r(0, 0) = rt;
  r(1, 2) = rt;
  r(2, 1) = s;
  r(2, 2) = c;
  r(3, 3) = s;
  r(3, 0) = -c;

  HamiltonianStructure h2 = catalog_nc_h2(p);
  Mat m_canonical = 2.0 * p.theta * Mat(r.transpose() * h2.M * r);
  m_canonical = 0.5 * (m_canonical + Mat(m_canonical.transpose()));

  H2Realization real;
  real.map = r;
  PhaseChart chart(4, {"x1", "x2", "px1", "px2"});
  real.transformed.chart = chart;
  real.transformed.J = PoissonMatrix(canonical_j(2), chart);
  real.transformed.M = m_canonical;
  real.transformed.provenance = Provenance::custom;
  return real;
}

// ---------------------------------------------------------------------------
// Spectrum comparison
// ---------------------------------------------------------------------------

struct ComparisonReport {
  int levels_compared = 0;
  double max_level_deviation = 0.0;  // relative
  double max_gap_deviation = 0.0;    // relative, offset-insensitive
  bool degeneracies_match = true;
  bool equal = false;
  double rel_tol = 0.0;
};

/// Align the lowest k merged levels of two discrete spectra.
inline ComparisonReport compare_spectra(const ModeSpectrum& a,
                                        const ModeSpectrum& b, int k,
                                        double rel_tol = 1e-9) {
  ComparisonReport rep;
  rep.rel_tol = rel_tol;
  rep.levels_compared =
      std::min({k, static_cast<int>(a.levels.size()),
                static_cast<int>(b.levels.size())});
  for (int i = 0; i < rep.levels_compared; ++i) {
    double ea = a.levels[i].energy, eb = b.levels[i].energy;
    double scale = std::max({std::abs(ea), std::abs(eb), 1e-300});
    rep.max_level_deviation =
        std::max(rep.max_level_deviation, std::abs(ea - eb) / scale);
    if (a.levels[i].degeneracy != b.levels[i].degeneracy)
      rep.degeneracies_match = false;
    if (i > 0) {
      double ga = ea - a.levels[i - 1].energy;
      double gb = eb - b.levels[i - 1].energy;
      double gscale = std::max({std::abs(ga), std::abs(gb), 1e-300});
      rep.max_gap_deviation =
          std::max(rep.max_gap_deviation, std::abs(ga - gb) / gscale);
    }
  }
  rep.equal = rep.levels_compared > 0 &&
              rep.max_level_deviation <= rel_tol && rep.degeneracies_match;
  return rep;
}

}  // namespace hamforge
