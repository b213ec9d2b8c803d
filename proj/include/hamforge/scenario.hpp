#pragma once

// Batch front-end plumbing: JSON scenario ingestion, the validate / equiv /
// spectrum / catalog command runners, report assembly and parameter sweeps.
// Reports are deterministic for a fixed scenario and seed; timing goes to the
// console, never into the report payload.

#include "hamforge/brackets.hpp"
#include "hamforge/core.hpp"
#include "hamforge/dynamics.hpp"
#include "hamforge/fock.hpp"
#include "hamforge/lagrangian.hpp"
#include "hamforge/random.hpp"
#include "hamforge/spectra.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace hamforge {

using Json = nlohmann::ordered_json;

inline constexpr const char* kLibraryVersion = "hamforge 1.0.0";

// exit codes for the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitVerdict = 3;

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct IntegrateBlock {
  std::optional<Vec> x0;
  std::optional<Vec> q0, qdot0;
  double t_end = 10.0;
  double dt = 1e-3;
  IntegrationMethod method = IntegrationMethod::rk4;
  std::string chart = "qu";
};

struct EquivBlock {
  std::vector<Chart> charts = {Chart::qu, Chart::qp};
  double tol = 1e-8;
  std::optional<Vec> q0, qdot0;
  double t_end = 10.0;
  double dt = 1e-3;
};

struct SpectrumBlock {
  int n_max = 6;
  int l_max = 6;
  std::string chart = "qu";
};

struct OracleBlock {
  int cutoff = 40;
  int k = 6;
};

struct Scenario {
  std::optional<QuadraticModel> model;
  std::optional<std::string> catalog_name;
  LandauParams landau;
  NCParams nc;
  std::optional<IntegrateBlock> integrate_block;
  std::optional<EquivBlock> equiv_block;
  std::optional<SpectrumBlock> spectrum_block;
  std::optional<OracleBlock> oracle_block;
  uint64_t seed = 0;
  Json echo;  // original document, echoed into reports
};

namespace detail {

inline Mat parse_matrix(const Json& j, const std::string& name) {
  if (!j.is_array() || j.empty())
    throw ParseError("field '" + name + "' must be a non-empty row-major matrix");
  size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array())
      throw ParseError("field '" + name + "' must be nested arrays");
    if (cols == 0) cols = row.size();
    if (row.size() != cols || cols == 0)
      throw ParseError("field '" + name + "' must be rectangular");
  }
  Mat m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r)
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw ParseError("field '" + name + "' must contain real numbers");
      m(r, c) = j[r][c].get<double>();
    }
  return m;
}

inline Vec parse_vector(const Json& j, const std::string& name) {
  if (!j.is_array()) throw ParseError("field '" + name + "' must be an array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ParseError("field '" + name + "' must be numeric");
    v(i) = j[i].get<double>();
  }
  return v;
}

inline Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

inline Scenario parse_scenario(const Json& doc) {
  Scenario sc;
  sc.echo = doc;
  bool has_model = doc.contains("model");
  bool has_catalog = doc.contains("catalog");
  if (has_model == has_catalog)
    throw ParseError("scenario must contain exactly one of 'model' or 'catalog'");

  if (has_model) {
    const Json& m = doc["model"];
    Mat t = detail::parse_matrix(m.at("T"), "T");
    Mat theta = detail::parse_matrix(m.at("theta"), "theta");
    Mat v = detail::parse_matrix(m.at("V"), "V");
    if (m.contains("n") && m["n"].get<int>() != t.rows())
      throw ParseError("model field 'n' disagrees with matrix size");
    sc.model = build_model(t, theta, v);
  } else {
    sc.catalog_name = doc["catalog"].get<std::string>();
    const auto& names = catalog_names();
    if (std::find(names.begin(), names.end(), *sc.catalog_name) == names.end())
      throw ParseError("unknown catalog entry '" + *sc.catalog_name + "'");
    if (doc.contains("params")) {
      const Json& p = doc["params"];
      if (p.contains("m")) sc.landau.m = p["m"].get<double>();
      if (p.contains("e")) sc.landau.e = p["e"].get<double>();
      if (p.contains("B")) {
        sc.landau.B = p["B"].get<double>();
        sc.nc.B = p["B"].get<double>();
      }
      if (p.contains("p3")) sc.landau.p3 = p["p3"].get<double>();
      if (p.contains("omega")) sc.nc.omega = p["omega"].get<double>();
      if (p.contains("theta")) sc.nc.theta = p["theta"].get<double>();
    }
  }

  if (doc.contains("seed")) sc.seed = doc["seed"].get<uint64_t>();

  if (doc.contains("integrate")) {
    const Json& b = doc["integrate"];
    IntegrateBlock blk;
    if (b.contains("x0")) blk.x0 = detail::parse_vector(b["x0"], "x0");
    if (b.contains("q0")) blk.q0 = detail::parse_vector(b["q0"], "q0");
    if (b.contains("qdot0")) blk.qdot0 = detail::parse_vector(b["qdot0"], "qdot0");
    if (b.contains("t_end")) blk.t_end = b["t_end"].get<double>();
    if (b.contains("dt")) blk.dt = b["dt"].get<double>();
    if (b.contains("method")) blk.method = method_from_string(b["method"].get<std::string>());
    if (b.contains("chart")) blk.chart = b["chart"].get<std::string>();
    sc.integrate_block = blk;
  }
  if (doc.contains("equiv")) {
    const Json& b = doc["equiv"];
    EquivBlock blk;
    if (b.contains("charts")) {
      blk.charts.clear();
      for (const auto& c : b["charts"])
        blk.charts.push_back(chart_from_string(c.get<std::string>()));
    }
    if (b.contains("tol")) blk.tol = b["tol"].get<double>();
    if (b.contains("q0")) blk.q0 = detail::parse_vector(b["q0"], "q0");
    if (b.contains("qdot0")) blk.qdot0 = detail::parse_vector(b["qdot0"], "qdot0");
    if (b.contains("t_end")) blk.t_end = b["t_end"].get<double>();
    if (b.contains("dt")) blk.dt = b["dt"].get<double>();
    sc.equiv_block = blk;
  }
  if (doc.contains("spectrum")) {
    const Json& b = doc["spectrum"];
    SpectrumBlock blk;
    if (b.contains("n_max")) blk.n_max = b["n_max"].get<int>();
    if (b.contains("l_max")) blk.l_max = b["l_max"].get<int>();
    if (b.contains("chart")) blk.chart = b["chart"].get<std::string>();
    sc.spectrum_block = blk;
  }
  if (doc.contains("oracle")) {
    const Json& b = doc["oracle"];
    OracleBlock blk;
    if (b.contains("cutoff")) blk.cutoff = b["cutoff"].get<int>();
    if (b.contains("k")) blk.k = b["k"].get<int>();
    sc.oracle_block = blk;
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario JSON parse error: ") + e.what());
  }
  return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

struct RunReport {
  Json payload;
  int exit_code = kExitOk;
  // side files to write under --out: (relative name, contents)
  std::vector<std::pair<std::string, std::string>> files;
};

namespace detail {

struct NamedStructure {
  std::string name;
  HamiltonianStructure structure;
};

/// Structures a scenario gives rise to: all applicable charts for a model,
/// the single entry for a catalog scenario.
inline std::vector<NamedStructure> scenario_structures(const Scenario& sc) {
  std::vector<NamedStructure> out;
  if (sc.model) {
    out.push_back({"qu", build_structure_qu(*sc.model)});
    out.push_back({"qp", build_structure_qp(*sc.model)});
    double scale = std::max(max_abs(sc.model->T), 1.0);
    if (max_abs(sc.model->V - sc.model->T) / scale <= 1e-12)
      out.push_back({"qv", build_structure_qv(*sc.model)});
  } else {
    out.push_back({*sc.catalog_name, catalog(*sc.catalog_name, sc.landau, sc.nc)});
  }
  return out;
}

inline Json structure_summary(const NamedStructure& ns) {
  const auto& s = ns.structure;
  Json j;
  j["name"] = ns.name;
  j["provenance"] = to_string(s.provenance);
  j["labels"] = Json::array();
  for (const auto& l : s.chart.labels) j["labels"].push_back(l);
  double det = s.J.J.determinant();
  j["det_J"] = det;
  Eigen::JacobiSVD<Mat> svd(s.J.J);
  double smax = svd.singularValues().maxCoeff();
  double smin = svd.singularValues().minCoeff();
  j["singular_J"] = (smax <= 0.0 || smin < kSingularCutoff * smax);
  j["condition_J"] =
      j["singular_J"].get<bool>() ? Json(nullptr) : Json(smax / smin);
  return j;
}

inline Vec default_q0(int n) {
  Vec q = Vec::Zero(n);
  q(0) = 1.0;
  return q;
}

inline Vec default_qdot0(int n) {
  Vec q = Vec::Zero(n);
  q(n > 1 ? 1 : 0) = 1.0;
  return q;
}

/// Model a catalog entry's flow is equivalent to, where one exists without
/// any time rescaling.
inline std::optional<QuadraticModel> underlying_model(const Scenario& sc) {
  if (sc.model) return sc.model;
  const std::string& name = *sc.catalog_name;
  if (name == "landau_qp" || name == "landau_qu")
    return landau_model(sc.landau);
  if (name == "nc_h1" || name == "nc_h2") return nc_model(sc.nc);
  return std::nullopt;  // nc_np only matches a V = T model up to rescaling
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Build all applicable structures and run the structural validators:
/// J antisymmetry, the Jacobi identity, closure of the emitted one-form's
/// Lagrange bracket, and the sigma J = -I round trip. Flags singular J.
inline RunReport cmd_validate(const Scenario& sc) {
  RunReport rep;
  rep.payload["command"] = "validate";
  rep.payload["library_version"] = kLibraryVersion;
  rep.payload["scenario"] = sc.echo;
  Json structures = Json::array();
  bool all_pass = true;

  for (const auto& ns : detail::scenario_structures(sc)) {
    const auto& s = ns.structure;
    Json j = detail::structure_summary(ns);
    const int dim = s.dim();

    std::vector<Vec> points;
    points.push_back(Vec::Zero(dim));
    points.push_back(Vec::Ones(dim));
    points.push_back(-0.5 * Vec::Ones(dim));

    double antisym = antisymmetry_defect(s.J.J);
    j["antisymmetry_defect"] = antisym;

    Mat jconst = s.J.J;
    JacobiReport jac = check_jacobi([jconst](const Vec&) { return jconst; },
                                    points, 1e-5, 1e-12);
    j["jacobi_residual"] = jac.max_residual;

    bool structure_pass = antisym <= 1e-12 && jac.pass;

    if (s.lagrangian) {
      LagrangeBracket sigma =
          sigma_from_oneform(s.lagrangian->oneform, s.chart);
      Mat sconst = sigma.sigma;
      ClosureReport clo = check_closure(
          [sconst](const Vec&) { return sconst; }, points, 1e-5, 1e-12);
      j["closure_residual"] = clo.max_residual;
      double inv_residual =
          max_abs(sigma.sigma * s.J.J + Mat::Identity(dim, dim));
      j["sigma_inverse_residual"] = inv_residual;
      structure_pass = structure_pass && clo.pass && inv_residual <= 1e-12;
    } else {
      j["closure_residual"] = nullptr;
      j["sigma_inverse_residual"] = nullptr;
    }

    if (j["singular_J"].get<bool>()) {
      j["warning"] = "Poisson matrix is singular (det J = " +
                     format_full(j["det_J"].get<double>()) + ")";
      structure_pass = false;
    }
    j["pass"] = structure_pass;
    all_pass = all_pass && structure_pass;
    structures.push_back(j);
  }

  rep.payload["structures"] = structures;
  rep.payload["pass"] = all_pass;
  rep.exit_code = all_pass ? kExitOk : kExitDomain;
  return rep;
}

/// Property sweep over random models: sigma J = -I round trip, flow-spectrum
/// agreement between the {q,u} and {q,p} charts, and s-equivalence at coarse
/// sampling. Driven by the scenario seed.
inline RunReport cmd_validate_random(uint64_t seed, int count) {
  RunReport rep;
  rep.payload["command"] = "validate --random";
  rep.payload["library_version"] = kLibraryVersion;
  rep.payload["seed"] = seed;
  rep.payload["count"] = count;
  std::mt19937_64 rng(seed);

  int failures = 0;
  double worst_inverse = 0.0, worst_spectrum = 0.0, worst_equiv = 0.0;
  for (int i = 0; i < count; ++i) {
    int n = 2 + static_cast<int>(rng() % 2);
    QuadraticModel m = random_model(rng, n);
    auto qu = build_structure_qu(m);
    auto qp = build_structure_qp(m);

    LagrangeBracket sigma = sigma_from_oneform(qu.lagrangian->oneform, qu.chart);
    PoissonMatrix j = invert_sigma(sigma);
    double inv_res = max_abs(Mat(sigma.sigma * j.J) + Mat::Identity(2 * n, 2 * n));
    worst_inverse = std::max(worst_inverse, inv_res);

    double dev = eigenvalue_multiset_distance(flow_matrix(qu), flow_matrix(qp));
    worst_spectrum = std::max(worst_spectrum, dev);

    EquivalenceReport eq = s_equivalence(m, {Chart::qu, Chart::qp},
                                         random_vector(rng, n),
                                         random_vector(rng, n), 5.0, 0.05, 1e-8);
    worst_equiv = std::max(worst_equiv, eq.max_q_deviation);

    if (inv_res > 1e-12 || dev > 1e-10 || !eq.pass) ++failures;
  }

  rep.payload["max_sigma_inverse_residual"] = worst_inverse;
  rep.payload["max_flow_spectrum_deviation"] = worst_spectrum;
  rep.payload["max_q_deviation"] = worst_equiv;
  rep.payload["failures"] = failures;
  rep.payload["pass"] = failures == 0;
  rep.exit_code = failures == 0 ? kExitOk : kExitDomain;
  return rep;
}

/// s-equivalence across the requested charts with matched initial data;
/// writes one trajectory CSV per chart.
inline RunReport cmd_equiv(const Scenario& sc) {
  RunReport rep;
  rep.payload["command"] = "equiv";
  rep.payload["library_version"] = kLibraryVersion;
  rep.payload["scenario"] = sc.echo;

  std::optional<QuadraticModel> model = detail::underlying_model(sc);
  if (!model)
    throw Error("equiv needs a model scenario or a catalog entry with an "
                "equivalent second-order model");
  EquivBlock blk = sc.equiv_block.value_or(EquivBlock{});

  const int n = model->n;
  Vec q0 = blk.q0.value_or(detail::default_q0(n));
  Vec qdot0 = blk.qdot0.value_or(detail::default_qdot0(n));
  if (q0.size() != n || qdot0.size() != n)
    throw Error("equiv initial data must have length n");

  EquivalenceReport eq =
      s_equivalence(*model, blk.charts, q0, qdot0, blk.t_end, blk.dt, blk.tol);

  Json charts = Json::array();
  for (Chart c : blk.charts) charts.push_back(to_string(c));
  rep.payload["charts"] = charts;
  rep.payload["q0"] = detail::vec_to_json(q0);
  rep.payload["qdot0"] = detail::vec_to_json(qdot0);
  rep.payload["t_end"] = blk.t_end;
  rep.payload["dt"] = blk.dt;
  Json report;
  report["max_q_deviation"] = eq.max_q_deviation;
  report["tolerance"] = eq.tolerance;
  report["verdict"] = eq.pass ? "pass" : "fail";
  Json drift;
  for (const auto& [chart, d] : eq.energy_drift) drift[chart] = d;
  report["energy_drift"] = drift;
  rep.payload["report"] = report;

  // per-chart trajectory CSVs from the exact propagator on a coarse grid
  double csv_dt = std::max(blk.dt, blk.t_end / 2000.0);
  for (Chart c : blk.charts) {
    HamiltonianStructure s = build_structure(*model, c);
    Vec x0 = initial_state(*model, c, q0, qdot0);
    Trajectory tr = exact_trajectory(s, x0, blk.t_end, csv_dt);
    rep.files.emplace_back(std::string("trajectory_") + to_string(c) + ".csv",
                           trajectory_csv(tr));
  }

  rep.exit_code = eq.pass ? kExitOk : kExitVerdict;
  return rep;
}

namespace detail {

inline Json levels_to_json(const std::vector<Level>& levels) {
  Json out = Json::array();
  for (const auto& l : levels) {
    Json j;
    j["E"] = l.energy;
    j["degeneracy"] = l.degeneracy;
    j["quanta"] = Json::array();
    for (int q : l.quanta) j["quanta"].push_back(q);
    out.push_back(j);
  }
  return out;
}

inline Json spectrum_to_json(const ModeSpectrum& spec) {
  Json j;
  Json modes = Json::array();
  for (const auto& m : spec.modes) {
    Json mj;
    mj["kind"] = to_string(m.kind);
    mj["omega"] = m.omega;
    mj["multiplicity"] = m.multiplicity;
    modes.push_back(mj);
  }
  j["modes"] = modes;
  j["ground_energy"] = spec.ground_energy;
  j["infinite_degeneracy"] = spec.infinite_degeneracy;
  j["levels"] = levels_to_json(spec.levels);
  return j;
}

inline std::string spectrum_csv(const ModeSpectrum& spec) {
  std::string out = "E,degeneracy\n";
  for (const auto& l : spec.levels)
    out += format_full(l.energy) + "," + std::to_string(l.degeneracy) + "\n";
  return out;
}

}  // namespace detail

/// Normal modes plus closed-form level enumeration; optionally the Fock
/// oracle cross-check with its convergence certificate.
inline RunReport cmd_spectrum(const Scenario& sc, bool with_oracle,
                              std::optional<int> cutoff_override) {
  RunReport rep;
  rep.payload["command"] = "spectrum";
  rep.payload["library_version"] = kLibraryVersion;
  rep.payload["scenario"] = sc.echo;
  SpectrumBlock blk = sc.spectrum_block.value_or(SpectrumBlock{});

  HamiltonianStructure s;
  std::string name;
  if (sc.model) {
    Chart c = chart_from_string(blk.chart);
    s = build_structure(*sc.model, c);
    name = blk.chart;
  } else {
    s = catalog(*sc.catalog_name, sc.landau, sc.nc);
    name = *sc.catalog_name;
  }
  rep.payload["structure"] = detail::structure_summary({name, s});

  std::vector<NormalMode> modes = normal_modes(s);
  ModeSpectrum spec = closed_form_levels(modes, blk.n_max);
  // constant p3^2/2m offset for the planar Landau charts
  if (sc.catalog_name &&
      (*sc.catalog_name == "landau_qp" || *sc.catalog_name == "landau_qu") &&
      sc.landau.p3 != 0.0) {
    double offset = sc.landau.p3 * sc.landau.p3 / (2.0 * sc.landau.m);
    for (auto& l : spec.levels) l.energy += offset;
    spec.ground_energy += offset;
  }
  rep.payload["spectrum"] = detail::spectrum_to_json(spec);
  rep.files.emplace_back("spectrum.csv", detail::spectrum_csv(spec));

  if (sc.catalog_name) {
    if (*sc.catalog_name == "landau_qp" || *sc.catalog_name == "landau_qu") {
      ModeSpectrum ll = landau_levels(sc.landau, blk.l_max);
      Json j = detail::spectrum_to_json(ll);
      j["omega0"] = std::abs(sc.landau.e * sc.landau.B) / sc.landau.m;
      rep.payload["landau_levels"] = j;
    }
    if (*sc.catalog_name == "nc_h1") {
      H1Closed c = h1_frequencies(sc.nc);
      Json j;
      try {
        j = detail::spectrum_to_json(h1_levels(sc.nc, blk.n_max, blk.l_max));
      } catch (const NegativeModeFrequency& e) {
        j["error"] = e.what();  // closed form undefined outside Omega > lambda/2
      }
      j["Omega"] = c.Omega;
      j["lambda"] = c.lambda;
      rep.payload["h1_levels"] = j;
    }
  }

  if (with_oracle) {
    OracleBlock ob = sc.oracle_block.value_or(OracleBlock{});
    if (cutoff_override) ob.cutoff = *cutoff_override;
    OracleResult res = oracle_spectrum(s, ob.cutoff, ob.k);
    Json j;
    j["cutoff"] = res.cutoff;
    j["k"] = ob.k;
    j["certificate"] = res.certificate;
    j["energies"] = Json::array();
    for (double e : res.energies) j["energies"].push_back(e);
    // flatten closed-form levels by degeneracy for a direct comparison
    double max_dev = 0.0;
    std::vector<double> flat;
    for (const auto& l : spec.levels)
      for (int d = 0; d < l.degeneracy && flat.size() < res.energies.size(); ++d)
        flat.push_back(l.energy);
    for (size_t i = 0; i < res.energies.size() && i < flat.size(); ++i)
      max_dev = std::max(max_dev, std::abs(res.energies[i] - flat[i]));
    j["max_deviation_from_closed_form"] = max_dev;
    rep.payload["oracle"] = j;
  }

  rep.exit_code = kExitOk;
  return rep;
}

/// Fixed-step integration on one chart with conservation audit columns.
inline RunReport cmd_integrate(const Scenario& sc) {
  RunReport rep;
  rep.payload["command"] = "integrate";
  rep.payload["library_version"] = kLibraryVersion;
  rep.payload["scenario"] = sc.echo;
  IntegrateBlock blk = sc.integrate_block.value_or(IntegrateBlock{});

  HamiltonianStructure s;
  Vec x0;
  if (sc.model) {
    Chart c = chart_from_string(blk.chart);
    s = build_structure(*sc.model, c);
    if (blk.x0) {
      x0 = *blk.x0;
    } else {
      Vec q0 = blk.q0.value_or(detail::default_q0(sc.model->n));
      Vec qdot0 = blk.qdot0.value_or(detail::default_qdot0(sc.model->n));
      x0 = initial_state(*sc.model, c, q0, qdot0);
    }
  } else {
    s = catalog(*sc.catalog_name, sc.landau, sc.nc);
    if (!blk.x0) throw Error("catalog integrate runs need an explicit x0");
    x0 = *blk.x0;
  }
  if (x0.size() != s.dim()) throw Error("x0 length does not match chart");

  Trajectory tr = integrate(s, x0, blk.t_end, blk.dt, blk.method);
  ConservationAudit audit = conservation_audit(tr, s);
  rep.payload["samples"] = tr.size();
  rep.payload["aborted"] = tr.aborted;
  rep.payload["max_energy_drift"] = audit.max_energy_drift;
  rep.payload["max_casimir_drift"] = audit.max_casimir_drift;
  rep.files.emplace_back("trajectory.csv", trajectory_csv(tr));
  rep.exit_code = tr.aborted ? kExitDomain : kExitOk;
  return rep;
}

/// Named scenarios with parameter schemas; stable ordering.
inline RunReport cmd_catalog() {
  RunReport rep;
  rep.payload["command"] = "catalog";
  rep.payload["library_version"] = kLibraryVersion;
  Json entries = Json::array();
  auto add = [&](const std::string& name, const Json& params,
                 const std::string& desc) {
    Json e;
    e["name"] = name;
    e["params"] = params;
    e["description"] = desc;
    entries.push_back(e);
  };
  Json landau_schema;
  landau_schema["m"] = 1.0;
  landau_schema["e"] = 1.0;
  landau_schema["B"] = 1.0;
  landau_schema["p3"] = 0.0;
  Json nc_schema;
  nc_schema["omega"] = 1.0;
  nc_schema["theta"] = 0.0;
  nc_schema["B"] = 0.0;
  add("landau_qp", landau_schema,
      "charged planar particle in a uniform magnetic field, canonical "
      "{q,p} chart (symmetric gauge); levels |eB|/m (l + 1/2)");
  add("landau_qu", landau_schema,
      "same Landau flow on the velocity chart {q,u}: [u1,u2] = eB/m^2, "
      "a noncanonical but equivalent bracket");
  add("nc_h1", nc_schema,
      "oscillator with commuting coordinates and deformed velocity "
      "brackets [u1,u2] = B + theta omega^2; det J = 1 everywhere");
  add("nc_h2", nc_schema,
      "second bracket for the same flow with noncommuting coordinates "
      "[q1,q2] = theta; det J = (1 - theta B)^2, singular at theta B = 1");
  add("nc_np", nc_schema,
      "fully noncommutative oscillator chart [q,q] = theta eps, [v,v] = "
      "B eps; det J = (1 - theta B)^2, singular at theta B = 1");
  rep.payload["entries"] = entries;
  rep.exit_code = kExitOk;
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
  std::string param;
  double from = 0.0, to = 0.0, step = 0.0;
};

inline SweepSpec parse_sweep(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos) throw Error("sweep must look like param=a:b:step");
  SweepSpec s;
  s.param = text.substr(0, eq);
  std::string range = text.substr(eq + 1);
  auto c1 = range.find(':');
  auto c2 = range.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw Error("sweep must look like param=a:b:step");
  try {
    s.from = std::stod(range.substr(0, c1));
    s.to = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
    s.step = std::stod(range.substr(c2 + 1));
  } catch (const std::exception&) {
    throw Error("sweep bounds must be numeric");
  }
  if (s.step <= 0.0) throw Error("sweep step must be positive");
  return s;
}

inline std::vector<double> sweep_values(const SweepSpec& s) {
  std::vector<double> vals;
  for (double v = s.from; v <= s.to + 1e-12 * std::max(1.0, std::abs(s.to));
       v += s.step)
    vals.push_back(v);
  return vals;
}

inline int worker_count(size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("HAMFORGE_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::min<size_t>(hw, jobs));
}

/// Expand a sweep into independent jobs, run them on a capped worker pool
/// and collect per-value reports keyed by parameter value.
inline std::vector<std::pair<double, RunReport>> run_sweep(
    const Scenario& base, const SweepSpec& spec,
    const std::function<RunReport(const Scenario&)>& job) {
  if (!base.catalog_name)
    throw Error("--sweep supports catalog scenarios (parameter grids)");
  static const std::vector<std::string> known = {"omega", "theta", "B",
                                                 "m", "e", "p3"};
  if (std::find(known.begin(), known.end(), spec.param) == known.end())
    throw Error("unknown sweep parameter '" + spec.param + "'");
  std::vector<double> values = sweep_values(spec);
  std::vector<std::pair<double, RunReport>> results(values.size());

  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      Scenario sc = base;
      double v = values[i];
      if (spec.param == "omega") sc.nc.omega = v;
      else if (spec.param == "theta") sc.nc.theta = v;
      else if (spec.param == "B") { sc.nc.B = v; sc.landau.B = v; }
      else if (spec.param == "m") sc.landau.m = v;
      else if (spec.param == "e") sc.landau.e = v;
      else if (spec.param == "p3") sc.landau.p3 = v;
      sc.echo["params"][spec.param] = v;
      RunReport rep;
      try {
        rep = job(sc);
      } catch (const Error& err) {
        rep.payload["error"] = err.what();
        rep.exit_code = kExitDomain;
      }
      results[i] = {v, std::move(rep)};
    }
  };

  int workers = worker_count(values.size());
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace hamforge
