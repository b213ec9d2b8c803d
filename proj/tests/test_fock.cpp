#include "hamforge/fock.hpp"
#include "hamforge/random.hpp"
#include "hamforge/spectra.hpp"

#include <catch_amalgamated.hpp>

using namespace hamforge;

namespace {

const NCParams kDesk{1.0, 0.2, 0.5};

std::vector<double> lowest_eigs(const TruncatedOperator& op, int k) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(op.matrix, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < k; ++i) out.push_back(eig.eigenvalues()(i));
  return out;
}

}  // namespace

TEST_CASE("canonicalize") {
  SECTION("the canonical block maps to the identity") {
    PoissonMatrix j(canonical_j(2), PhaseChart::paired(2, "p"));
    CanonicalFrame frame = canonicalize(j);
    REQUIRE(max_abs(frame.S - Mat::Identity(4, 4)) < 1e-14);
  }

  SECTION("fully noncommutative chart away from the degeneracy") {
    HamiltonianStructure s = build_structure_nc(1.0, 0.2, 0.5);
    CanonicalFrame frame = canonicalize(s.J);
    REQUIRE(frame.defect < 1e-10);
    REQUIRE(frame.conditioning >= 1.0);
  }

  SECTION("theta B = 1 has no canonical realization") {
    HamiltonianStructure s = build_structure_nc(1.0, 1.0, 1.0);
    REQUIRE_THROWS_AS(canonicalize(s.J), SingularPoissonMatrix);
  }

  SECTION("round trip on random nonsingular antisymmetric matrices") {
    std::mt19937_64 rng(73);
    int accepted = 0;
    while (accepted < 100) {
      int n = 1 + static_cast<int>(rng() % 3);
      Mat a = random_matrix(rng, 2 * n, 2 * n);
      Mat j = a - Mat(a.transpose());
      if (condition_number(j) > 1e6) continue;
      ++accepted;
      CanonicalFrame frame = canonicalize(
          PoissonMatrix(j, PhaseChart::paired(n, "p")));
      REQUIRE(max_abs(frame.S * j * Mat(frame.S.transpose()) -
                      canonical_j(n)) < 1e-10);
    }
  }
}

TEST_CASE("fock_hamiltonian") {
  SECTION("isotropic two-mode tower 1, 2, 2, 3, 3, 3") {
    HamiltonianStructure s = build_structure_nc(1.0, 0.0, 0.0);
    CanonicalFrame frame = canonicalize(s.J);
    TruncatedOperator op = fock_hamiltonian(s, frame, 10);
    REQUIRE(op.dimension == 100);
    auto e = lowest_eigs(op, 6);
    std::vector<double> expected = {1, 2, 2, 3, 3, 3};
    for (int i = 0; i < 6; ++i) REQUIRE(std::abs(e[i] - expected[i]) < 1e-10);
  }

  SECTION("single mode of frequency two is an arithmetic progression") {
    PhaseChart chart(2, {"q", "p"});
    HamiltonianStructure s;
    s.chart = chart;
    s.J = PoissonMatrix(canonical_j(1), chart);
    Vec d(2);
    d << 4.0, 1.0;  // H = (p^2 + 4 q^2)/2, omega = 2
    s.M = d.asDiagonal();
    CanonicalFrame frame = canonicalize(s.J);
    TruncatedOperator op = fock_hamiltonian(s, frame, 40);
    auto e = lowest_eigs(op, 5);
    for (int i = 0; i < 5; ++i)
      REQUIRE(std::abs(e[i] - (2.0 * i + 1.0)) < 1e-10);
  }

  SECTION("hermiticity defect stays below 1e-12 on the catalog") {
    LandauParams lp{1.0, 1.0, 1.0, 0.0};
    for (const auto& name : {"nc_h1", "nc_h2", "nc_np"}) {
      HamiltonianStructure s = catalog(name, lp, kDesk);
      CanonicalFrame frame = canonicalize(s.J);
      TruncatedOperator op = fock_hamiltonian(s, frame, 12);
      REQUIRE(op.hermiticity_defect < 1e-12);
    }
  }

  SECTION("meaningless truncations are rejected") {
    HamiltonianStructure s = build_structure_nc(1.0, 0.0, 0.0);
    CanonicalFrame frame = canonicalize(s.J);
    REQUIRE_THROWS_AS(fock_hamiltonian(s, frame, 3), Error);
  }
}

TEST_CASE("oracle_spectrum") {
  SECTION("deformed oscillator matches its closed form") {
    HamiltonianStructure s = catalog("nc_h1", LandauParams{}, kDesk);
    OracleResult res = oracle_spectrum(s, 25, 6);
    REQUIRE(res.certificate < 1e-8);

    H1Closed c = h1_frequencies(kDesk);
    std::vector<double> closed;
    for (int n1 = 0; n1 < 6; ++n1)
      for (int n2 = 0; n2 < 6; ++n2)
        closed.push_back(c.omega_minus * (n1 + 0.5) + c.omega_plus * (n2 + 0.5));
    std::sort(closed.begin(), closed.end());
    for (int i = 0; i < 6; ++i)
      REQUIRE(std::abs(res.energies[i] - closed[i]) < 1e-6);
  }

  SECTION("flat directions are not positive definite") {
    HamiltonianStructure s =
        catalog("landau_qp", LandauParams{1.0, 1.0, 1.0, 0.0}, kDesk);
    REQUIRE_THROWS_AS(oracle_spectrum(s, 12, 4), NotPositiveDefinite);
  }

  SECTION("strong deformation: the H1 chart is unbounded below, H2 is not") {
    // B theta > 1: the two structures share one classical flow, yet the
    // H1 Hamiltonian is indefinite (its q^2 coefficient flips sign) while
    // the H2 Hamiltonian stays positive definite. Quantization separates
    // the s-equivalent structures.
    NCParams p{1.0, 1.0, 2.0};
    HamiltonianStructure h1 = catalog("nc_h1", LandauParams{}, p);
    HamiltonianStructure h2 = catalog("nc_h2", LandauParams{}, p);
    REQUIRE(max_abs(flow_matrix(h1) - flow_matrix(h2)) < 1e-12);
    REQUIRE_THROWS_AS(oracle_spectrum(h1, 12, 4), NotPositiveDefinite);

    OracleResult res = oracle_spectrum(h2, 30, 4);
    // omega_+ = |Omega + lambda/2|, omega_- = |Omega - lambda/2| with
    // Omega = sqrt(1.25), lambda = 3; ground = (omega_+ + omega_-)/2 = 1.5
    double op = std::sqrt(1.25) + 1.5, om = 1.5 - std::sqrt(1.25);
    REQUIRE(std::abs(res.energies[0] - 1.5) < 1e-7);
    REQUIRE(std::abs(res.energies[1] - (1.5 + om)) < 1e-7);
    REQUIRE(std::abs(res.energies[3] - (1.5 + std::min(3.0 * om, op))) < 1e-7);
  }

  SECTION("undeformed tower to 1e-8") {
    HamiltonianStructure s = build_structure_nc(1.0, 0.0, 0.0);
    OracleResult res = oracle_spectrum(s, 16, 6);
    std::vector<double> expected = {1, 2, 2, 3, 3, 3};
    for (int i = 0; i < 6; ++i)
      REQUIRE(std::abs(res.energies[i] - expected[i]) < 1e-8);
  }

  SECTION("lowest eigenvalue is non-increasing in the cutoff") {
    HamiltonianStructure s = catalog("nc_h1", LandauParams{}, kDesk);
    CanonicalFrame frame = canonicalize(s.J);
    double prev = std::numeric_limits<double>::infinity();
    for (int cut : {10, 20, 40}) {
      TruncatedOperator op = fock_hamiltonian(s, frame, cut);
      double lo = lowest_eigs(op, 1)[0];
      REQUIRE(lo <= prev + 1e-12);
      prev = lo;
    }
  }

  SECTION("chart independence of the quantum spectrum") {
    // same model, velocity chart vs canonical chart; both brackets are
    // nonsingular and H is positive definite
    QuadraticModel m = build_model(Mat::Identity(2, 2), eps2(),
                                   Mat::Identity(2, 2));
    OracleResult a = oracle_spectrum(build_structure_qu(m), 30, 6);
    OracleResult b = oracle_spectrum(build_structure_qp(m), 30, 6);
    for (int i = 0; i < 6; ++i)
      REQUIRE(std::abs(a.energies[i] - b.energies[i]) < 1e-6);
  }
}
