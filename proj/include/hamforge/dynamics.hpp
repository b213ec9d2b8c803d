#pragma once

// Linear flows x' = J grad(H) = (J M) x: exact matrix-exponential propagation
// (the integration oracle), RK4 and implicit-midpoint steppers, conserved-
// quantity audits, and the classical s-equivalence certificate across charts.

#include "hamforge/brackets.hpp"
#include "hamforge/core.hpp"
#include "hamforge/lagrangian.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <string>
#include <vector>

namespace hamforge {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Sampled flow with per-sample energy and Casimir audit columns.
struct Trajectory {
  PhaseChart chart;
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> energies;           // H(x(t))
  std::vector<std::vector<double>> casimirs;  // casimirs[i][k] = k-th Casimir
  bool aborted = false;  // true when a non-finite state cut the run short

  size_t size() const { return times.size(); }
};

struct EquivalenceReport {
  double max_q_deviation = 0.0;
  std::vector<std::pair<std::string, double>> energy_drift;  // per chart
  double tolerance = 0.0;
  bool pass = false;
};

enum class IntegrationMethod { rk4, implicit_midpoint };

inline IntegrationMethod method_from_string(const std::string& s) {
  if (s == "rk4") return IntegrationMethod::rk4;
  if (s == "implicit_midpoint") return IntegrationMethod::implicit_midpoint;
  throw Error("unknown integration method '" + s + "'");
}

// ---------------------------------------------------------------------------
// Flow
// ---------------------------------------------------------------------------

/// K = J M; the flow is x' = K x. trace(K) = 0 always (J antisymmetric,
/// M symmetric), so the flow is volume preserving.
inline Mat flow_matrix(const HamiltonianStructure& s) { return s.J.J * s.M; }

/// exp(t K) x0 via scaling-and-squaring. Runaway modes at large t may
/// overflow to non-finite values; callers check all_finite.
inline Vec exact_propagate(const HamiltonianStructure& s, const Vec& x0,
                           double t) {
  if (!std::isfinite(t)) throw Error("exact_propagate requires finite t");
  Mat k = flow_matrix(s);
  return Mat((t * k).exp()) * x0;
}

namespace detail {

inline void append_sample(Trajectory& tr, const HamiltonianStructure& s,
                          const std::vector<Vec>& casimir_dirs, double t,
                          const Vec& x) {
  tr.times.push_back(t);
  tr.states.push_back(x);
  tr.energies.push_back(s.energy(x));
  std::vector<double> cas(casimir_dirs.size());
  for (size_t k = 0; k < casimir_dirs.size(); ++k) cas[k] = casimir_dirs[k].dot(x);
  tr.casimirs.push_back(std::move(cas));
}

}  // namespace detail

/// Fixed-step integration sampled at multiples of dt. The implicit midpoint
/// stage equation is linear and solved exactly (one LU solve per step), which
/// makes the update a Cayley transform of K: symplectic, and H is conserved
/// to roundoff. A non-finite state aborts with the partial trajectory and
/// the aborted flag set.
inline Trajectory integrate(const HamiltonianStructure& s, const Vec& x0,
                            double t_end, double dt,
                            IntegrationMethod method = IntegrationMethod::rk4) {
  if (dt <= 0.0 || t_end <= 0.0) throw Error("integrate requires dt > 0 and t_end > 0");
  Mat k = flow_matrix(s);
  const int dim = s.dim();
  auto steps = static_cast<long>(std::llround(t_end / dt));
  if (steps < 1) steps = 1;

  Trajectory tr;
  tr.chart = s.chart;
  std::vector<Vec> cas = casimir_basis(s.J);
  detail::append_sample(tr, s, cas, 0.0, x0);

  Eigen::PartialPivLU<Mat> midpoint_lu;
  Mat half_forward;
  if (method == IntegrationMethod::implicit_midpoint) {
    midpoint_lu.compute(Mat::Identity(dim, dim) - 0.5 * dt * k);
    half_forward = Mat::Identity(dim, dim) + 0.5 * dt * k;
  }

  Vec x = x0;
  for (long i = 1; i <= steps; ++i) {
    if (method == IntegrationMethod::rk4) {
      Vec k1 = k * x;
      Vec k2 = k * (x + 0.5 * dt * k1);
      Vec k3 = k * (x + 0.5 * dt * k2);
      Vec k4 = k * (x + dt * k3);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      x = midpoint_lu.solve(half_forward * x);
    }
    if (!all_finite(x)) {
      tr.aborted = true;
      break;
    }
    detail::append_sample(tr, s, cas, static_cast<double>(i) * dt, x);
  }
  return tr;
}

/// Trajectory sampled from the exact propagator: one exp(dt K) per run,
/// powered up across the grid.
inline Trajectory exact_trajectory(const HamiltonianStructure& s, const Vec& x0,
                                   double t_end, double dt) {
  if (dt <= 0.0 || t_end <= 0.0)
    throw Error("exact_trajectory requires dt > 0 and t_end > 0");
  Mat step = Mat((dt * flow_matrix(s)).exp());
  auto steps = static_cast<long>(std::llround(t_end / dt));
  if (steps < 1) steps = 1;

  Trajectory tr;
  tr.chart = s.chart;
  std::vector<Vec> cas = casimir_basis(s.J);
  Vec x = x0;
  detail::append_sample(tr, s, cas, 0.0, x);
  for (long i = 1; i <= steps; ++i) {
    x = step * x;
    if (!all_finite(x)) {
      tr.aborted = true;
      break;
    }
    detail::append_sample(tr, s, cas, static_cast<double>(i) * dt, x);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Conservation audit
// ---------------------------------------------------------------------------

struct ConservationAudit {
  std::vector<double> energy_drift;                // |H(t) - H(0)| per sample
  std::vector<std::vector<double>> casimir_drift;  // per sample, per Casimir
  double max_energy_drift = 0.0;
  double max_casimir_drift = 0.0;
};

inline ConservationAudit conservation_audit(const Trajectory& tr,
                                            const HamiltonianStructure& s) {
  ConservationAudit audit;
  if (tr.times.empty()) return audit;
  std::vector<Vec> cas = casimir_basis(s.J);
  double h0 = s.energy(tr.states.front());
  std::vector<double> c0(cas.size());
  for (size_t k = 0; k < cas.size(); ++k) c0[k] = cas[k].dot(tr.states.front());

  for (size_t i = 0; i < tr.states.size(); ++i) {
    double dh = std::abs(s.energy(tr.states[i]) - h0);
    audit.energy_drift.push_back(dh);
    audit.max_energy_drift = std::max(audit.max_energy_drift, dh);
    std::vector<double> row(cas.size());
    for (size_t k = 0; k < cas.size(); ++k) {
      row[k] = std::abs(cas[k].dot(tr.states[i]) - c0[k]);
      audit.max_casimir_drift = std::max(audit.max_casimir_drift, row[k]);
    }
    audit.casimir_drift.push_back(std::move(row));
  }
  return audit;
}

// ---------------------------------------------------------------------------
// s-equivalence
// ---------------------------------------------------------------------------

/// Charts understood by s_equivalence.
enum class Chart { qu, qp, qv };

inline const char* to_string(Chart c) {
  switch (c) {
    case Chart::qu: return "qu";
    case Chart::qp: return "qp";
    default: return "qv";
  }
}

inline Chart chart_from_string(const std::string& s) {
  if (s == "qu") return Chart::qu;
  if (s == "qp") return Chart::qp;
  if (s == "qv") return Chart::qv;
  throw Error("unknown chart '" + s + "'");
}

inline HamiltonianStructure build_structure(const QuadraticModel& m, Chart c) {
  switch (c) {
    case Chart::qu: return build_structure_qu(m);
    case Chart::qp: return build_structure_qp(m);
    default: return build_structure_qv(m);
  }
}

/// Initial phase state on a chart matching position q0 and velocity qdot0.
inline Vec initial_state(const QuadraticModel& m, Chart c, const Vec& q0,
                         const Vec& qdot0) {
  Vec aux;
  switch (c) {
    case Chart::qu: aux = qdot0; break;
    case Chart::qp: aux = momentum_map(m, q0, qdot0); break;
    default: aux = v_map(m, q0, qdot0); break;
  }
  Vec x(2 * m.n);
  x << q0, aux;
  return x;
}

/// Certify classical s-equivalence: start every requested chart from the
/// same (q0, qdot0), propagate exactly, project onto the shared q block and
/// report the largest pairwise deviation over the sample grid.
inline EquivalenceReport s_equivalence(const QuadraticModel& m,
                                       const std::vector<Chart>& charts,
                                       const Vec& q0, const Vec& qdot0,
                                       double t_end = 10.0, double dt = 1e-3,
                                       double tol = 1e-8) {
  if (charts.empty()) throw Error("s_equivalence needs at least one chart");
  std::vector<HamiltonianStructure> structures;
  std::vector<Vec> states;
  for (Chart c : charts) {
    structures.push_back(build_structure(m, c));
    states.push_back(initial_state(m, c, q0, qdot0));
  }

  auto samples = static_cast<long>(std::llround(t_end / dt));
  if (samples < 1) samples = 1;

  EquivalenceReport report;
  report.tolerance = tol;
  const int n = m.n;

  std::vector<Mat> step(structures.size());
  std::vector<Vec> x = states;
  std::vector<double> h0(structures.size()), drift(structures.size(), 0.0);
  for (size_t i = 0; i < structures.size(); ++i) {
    step[i] = Mat((dt * flow_matrix(structures[i])).exp());
    h0[i] = structures[i].energy(x[i]);
  }

  for (long k = 0; k <= samples; ++k) {
    for (size_t i = 0; i < x.size(); ++i)
      for (size_t j = i + 1; j < x.size(); ++j) {
        double dev = (x[i].head(n) - x[j].head(n)).cwiseAbs().maxCoeff();
        report.max_q_deviation = std::max(report.max_q_deviation, dev);
      }
    for (size_t i = 0; i < x.size(); ++i) {
      drift[i] = std::max(drift[i], std::abs(structures[i].energy(x[i]) - h0[i]));
      if (k < samples) x[i] = step[i] * x[i];
    }
  }
  for (size_t i = 0; i < structures.size(); ++i)
    report.energy_drift.emplace_back(to_string(charts[i]), drift[i]);
  report.pass = report.max_q_deviation <= tol;
  return report;
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

/// Header `t, <labels...>, H, casimir_1...`; one row per sample, full
/// double precision.
inline std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t";
  for (const auto& lab : tr.chart.labels) out += "," + lab;
  out += ",H";
  size_t n_cas = tr.casimirs.empty() ? 0 : tr.casimirs.front().size();
  for (size_t k = 1; k <= n_cas; ++k) out += ",casimir_" + std::to_string(k);
  out += "\n";
  for (size_t i = 0; i < tr.size(); ++i) {
    out += format_full(tr.times[i]);
    for (int a = 0; a < tr.states[i].size(); ++a)
      out += "," + format_full(tr.states[i](a));
    out += "," + format_full(tr.energies[i]);
    for (double c : tr.casimirs[i]) out += "," + format_full(c);
    out += "\n";
  }
  return out;
}

}  // namespace hamforge
