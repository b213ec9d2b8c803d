#include "hamforge/random.hpp"
#include "hamforge/spectra.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>

using namespace hamforge;

namespace {

const NCParams kDesk{1.0, 0.2, 0.5};

std::vector<double> oscillator_frequencies(const std::vector<NormalMode>& modes) {
  std::vector<double> w;
  for (const auto& m : modes)
    if (m.kind == ModeKind::oscillator)
      for (int i = 0; i < m.multiplicity; ++i) w.push_back(m.omega);
  std::sort(w.begin(), w.end());
  return w;
}

int count_kind(const std::vector<NormalMode>& modes, ModeKind k) {
  int c = 0;
  for (const auto& m : modes)
    if (m.kind == k) c += m.multiplicity;
  return c;
}

}  // namespace

TEST_CASE("normal_modes classification") {
  SECTION("2D isotropic oscillator") {
    HamiltonianStructure s = build_structure_nc(1.0, 0.0, 0.0);
    auto modes = normal_modes(s);
    auto w = oscillator_frequencies(modes);
    REQUIRE(w.size() == 2);
    REQUIRE(std::abs(w[0] - 1.0) < 1e-12);
    REQUIRE(std::abs(w[1] - 1.0) < 1e-12);
  }

  SECTION("planar magnetic field: one oscillator plus a flat pair") {
    LandauParams lp{1.0, 1.0, 2.0, 0.0};
    HamiltonianStructure s = catalog("landau_qp", lp, kDesk);
    auto modes = normal_modes(s);
    auto w = oscillator_frequencies(modes);
    REQUIRE(w.size() == 1);
    REQUIRE(std::abs(w[0] - 2.0) < 1e-12);
    REQUIRE(count_kind(modes, ModeKind::degeneracy_pair) == 1);
    REQUIRE(count_kind(modes, ModeKind::shear) == 0);
  }

  SECTION("deformed oscillator splits into Omega -+ lambda/2") {
    HamiltonianStructure s = catalog("nc_h1", LandauParams{}, kDesk);
    auto w = oscillator_frequencies(normal_modes(s));
    REQUIRE(w.size() == 2);
    H1Closed c = h1_frequencies(kDesk);
    // root identities of nu^2 - lambda nu - (1 - B theta) omega^2 = 0
    REQUIRE(std::abs(w[0] * w[1] - 0.9) < 1e-10);
    REQUIRE(std::abs(w[1] - w[0] - c.lambda) < 1e-10);
    REQUIRE(std::abs(w[0] + w[1] - 2.0 * c.Omega) < 1e-10);
    REQUIRE(std::abs(w[0] - 0.6611874208078342) < 1e-10);
    REQUIRE(std::abs(w[1] - 1.3611874208078343) < 1e-10);
  }

  SECTION("free translations are shear modes") {
    QuadraticModel m =
        build_model(Mat::Identity(2, 2), Mat::Zero(2, 2), Mat::Zero(2, 2));
    auto modes = normal_modes(build_structure_qu(m));
    REQUIRE(count_kind(modes, ModeKind::shear) == 2);
    REQUIRE(count_kind(modes, ModeKind::degeneracy_pair) == 0);
    REQUIRE(oscillator_frequencies(modes).empty());
  }

  SECTION("inverted potential produces runaways") {
    QuadraticModel m = build_model(Mat::Identity(2, 2), Mat::Zero(2, 2),
                                   -Mat::Identity(2, 2));
    auto modes = normal_modes(build_structure_qp(m));
    REQUIRE(count_kind(modes, ModeKind::runaway) == 2);
  }

  SECTION("singular bracket is rejected") {
    HamiltonianStructure s = build_structure_nc(1.0, 1.0, 1.0);
    REQUIRE_THROWS_AS(normal_modes(s), SingularPoissonMatrix);
  }

  SECTION("sum rule: sum of omega^2 equals -trace(K^2)/2 for stable flows") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
      QuadraticModel m = random_model(rng, 2, /*force_v_equals_t=*/true);
      HamiltonianStructure s = build_structure_qu(m);
      auto modes = normal_modes(s);
      if (count_kind(modes, ModeKind::runaway) > 0) continue;
      double lhs = 0.0;
      for (double w : oscillator_frequencies(modes)) lhs += w * w;
      Mat k = flow_matrix(s);
      double rhs = -0.5 * (k * k).trace();
      REQUIRE(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }

  SECTION("mode frequencies are chart invariants") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
      QuadraticModel m = random_model(rng, 2 + static_cast<int>(rng() % 2));
      auto wu = oscillator_frequencies(normal_modes(build_structure_qu(m)));
      auto wp = oscillator_frequencies(normal_modes(build_structure_qp(m)));
      REQUIRE(wu.size() == wp.size());
      for (size_t i = 0; i < wu.size(); ++i)
        REQUIRE(std::abs(wu[i] - wp[i]) < 1e-10 * std::max(1.0, wu[i]));
    }
  }
}

TEST_CASE("closed_form_levels") {
  SECTION("single mode is an arithmetic progression") {
    std::vector<NormalMode> modes = {{ModeKind::oscillator, 2.0, 1}};
    ModeSpectrum spec = closed_form_levels(modes, 3);
    REQUIRE(spec.levels.size() == 4);
    for (int i = 0; i < 4; ++i)
      REQUIRE(std::abs(spec.levels[i].energy - (2.0 * i + 1.0)) < 1e-12);
  }

  SECTION("two equal modes give the n + 1 degeneracy pattern") {
    std::vector<NormalMode> modes = {{ModeKind::oscillator, 1.0, 2}};
    ModeSpectrum spec = closed_form_levels(modes, 4);
    REQUIRE(spec.ground_energy == 1.0);
    for (size_t i = 0; i < spec.levels.size(); ++i) {
      REQUIRE(std::abs(spec.levels[i].energy - double(i + 1)) < 1e-12);
      REQUIRE(spec.levels[i].degeneracy == static_cast<int>(i + 1));
    }
  }

  SECTION("flat directions annotate infinite degeneracy") {
    std::vector<NormalMode> modes = {{ModeKind::oscillator, 2.0, 1},
                                     {ModeKind::degeneracy_pair, 0.0, 1}};
    ModeSpectrum spec = closed_form_levels(modes, 2);
    REQUIRE(spec.infinite_degeneracy);
    REQUIRE(std::abs(spec.levels[0].energy - 1.0) < 1e-12);
  }

  SECTION("shear or runaway modes are rejected") {
    std::vector<NormalMode> shear = {{ModeKind::shear, 0.0, 1}};
    REQUIRE_THROWS_AS(closed_form_levels(shear, 2), UnstableSpectrum);
    std::vector<NormalMode> run = {{ModeKind::runaway, 0.0, 1}};
    REQUIRE_THROWS_AS(closed_form_levels(run, 2), UnstableSpectrum);
  }

  SECTION("arbitrary-spacing progression keeps 1e-12 spacing accuracy") {
    std::vector<NormalMode> modes = {{ModeKind::oscillator, 0.7300001, 1}};
    ModeSpectrum spec = closed_form_levels(modes, 10);
    for (size_t i = 1; i < spec.levels.size(); ++i)
      REQUIRE(std::abs(spec.levels[i].energy - spec.levels[i - 1].energy -
                       0.7300001) < 1e-12);
  }
}

TEST_CASE("landau_levels") {
  SECTION("unit parameters give 0.5, 1.5, 2.5") {
    ModeSpectrum spec = landau_levels(LandauParams{1.0, 1.0, 1.0, 0.0}, 2);
    REQUIRE(spec.levels.size() == 3);
    REQUIRE(std::abs(spec.levels[0].energy - 0.5) < 1e-14);
    REQUIRE(std::abs(spec.levels[1].energy - 1.5) < 1e-14);
    REQUIRE(std::abs(spec.levels[2].energy - 2.5) < 1e-14);
    REQUIRE(spec.infinite_degeneracy);
  }

  SECTION("out-of-plane momentum shifts every level") {
    ModeSpectrum base = landau_levels(LandauParams{1.0, 1.0, 1.0, 0.0}, 4);
    ModeSpectrum shifted = landau_levels(LandauParams{1.0, 1.0, 1.0, 2.0}, 4);
    for (size_t i = 0; i < base.levels.size(); ++i)
      REQUIRE(std::abs(shifted.levels[i].energy - base.levels[i].energy - 2.0) <
              1e-14);
  }

  SECTION("agrees with mode extraction on the canonical chart") {
    LandauParams lp{1.0, 1.0, 2.0, 0.0};
    ModeSpectrum closed = landau_levels(lp, 5);
    HamiltonianStructure s = catalog("landau_qp", lp, kDesk);
    ModeSpectrum numeric = closed_form_levels(normal_modes(s), 5);
    for (size_t i = 0; i < closed.levels.size(); ++i)
      REQUIRE(std::abs(closed.levels[i].energy - numeric.levels[i].energy) <
              1e-12);
  }

  SECTION("parameter preconditions") {
    REQUIRE_THROWS_AS(landau_levels(LandauParams{-1.0, 1.0, 1.0, 0.0}, 2),
                      Error);
    REQUIRE_THROWS_AS(landau_levels(LandauParams{1.0, 1.0, 0.0, 0.0}, 2),
                      Error);
  }
}

TEST_CASE("h1_levels") {
  SECTION("undeformed limit is the isotropic tower") {
    NCParams p{1.0, 0.0, 0.0};
    ModeSpectrum spec = h1_levels(p, 0, 5);
    // n = 0 row: E = omega (l + 1)
    for (int l = 0; l <= 5; ++l)
      REQUIRE(std::abs(spec.levels[l].energy - double(l + 1)) < 1e-12);
  }

  SECTION("desk parameters reproduce the closed-form corner values") {
    ModeSpectrum spec = h1_levels(kDesk, 4, 4);
    H1Closed c = h1_frequencies(kDesk);
    REQUIRE(std::abs(c.lambda - 0.7) < 1e-14);
    REQUIRE(std::abs(c.Omega - std::sqrt(1.0225)) < 1e-14);
    REQUIRE(std::abs(spec.levels[0].energy - 1.0111874208078342) < 1e-10);
    // E(0, 1) = 2 Omega - lambda / 2
    double e01 = 2.0 * c.Omega - 0.5 * c.lambda;
    REQUIRE(std::abs(e01 - 1.6723748416156685) < 1e-10);
    bool found = false;
    for (const auto& l : spec.levels)
      if (std::abs(l.energy - e01) < 1e-10) found = true;
    REQUIRE(found);
  }

  SECTION("every table entry appears in the mode enumeration") {
    ModeSpectrum table = h1_levels(kDesk, 4, 4);
    HamiltonianStructure s = catalog("nc_h1", LandauParams{}, kDesk);
    ModeSpectrum enumerated = closed_form_levels(normal_modes(s), 30);
    for (const auto& lvl : table.levels) {
      bool found = false;
      for (const auto& e : enumerated.levels)
        if (std::abs(e.energy - lvl.energy) <
            1e-10 * std::max(1.0, std::abs(lvl.energy)))
          found = true;
      REQUIRE(found);
    }
  }

  SECTION("regimes with a non-positive frequency are rejected") {
    NCParams p{1.0, 1.0, 2.0};  // lambda = 3, Omega = sqrt(1.25)
    REQUIRE_THROWS_AS(h1_levels(p, 2, 2), NegativeModeFrequency);
  }
}

TEST_CASE("catalog") {
  SECTION("canonical chart entry") {
    HamiltonianStructure s = catalog("landau_qp", LandauParams{}, kDesk);
    REQUIRE(max_abs(s.J.J - canonical_j(2)) == 0.0);
    REQUIRE(std::abs(s.J.J.determinant() - 1.0) < 1e-15);
  }

  SECTION("the H1 bracket is nowhere singular") {
    HamiltonianStructure s = catalog("nc_h1", LandauParams{}, kDesk);
    REQUIRE(std::abs(s.J.J.determinant() - 1.0) < 1e-13);
  }

  SECTION("fully noncommutative chart determinant") {
    HamiltonianStructure s = catalog("nc_np", LandauParams{}, kDesk);
    REQUIRE(std::abs(s.J.J.determinant() - 0.81) < 1e-12);
  }

  SECTION("H1 and H2 generate the same flow matrix") {
    HamiltonianStructure h1 = catalog("nc_h1", LandauParams{}, kDesk);
    HamiltonianStructure h2 = catalog("nc_h2", LandauParams{}, kDesk);
    REQUIRE(max_abs(flow_matrix(h1) - flow_matrix(h2)) < 1e-13);
    // H2 determinant identity det J = (1 - theta B)^2
    double expected = (1.0 - kDesk.theta * kDesk.B) * (1.0 - kDesk.theta * kDesk.B);
    REQUIRE(std::abs(h2.J.J.determinant() - expected) < 1e-12);
  }

  SECTION("unknown names are rejected") {
    REQUIRE_THROWS_AS(catalog("nope", LandauParams{}, kDesk), Error);
  }
}

TEST_CASE("H2 canonical realization") {
  NCParams p{1.0, 1.0, 2.0};  // theta > 0, B theta = 2 > 1

  SECTION("the map pulls the canonical bracket back to the H2 bracket") {
    H2Realization real = h2_realization(p);
    HamiltonianStructure h2 = catalog_nc_h2(p);
    Mat pulled = real.map * canonical_j(2) * Mat(real.map.transpose());
    REQUIRE(max_abs(pulled - h2.J.J) < 1e-12);
  }

  SECTION("transformed Hamiltonian closed form") {
    H2Realization real = h2_realization(p);
    double w2 = p.omega * p.omega;
    double a = 1.0 + p.theta * p.theta * w2;
    double su = std::sqrt(p.theta * p.B - 1.0);
    // 2 theta H2 = a (p1^2 + x1^2) + (theta B - 1)(p2^2 + x2^2)
    //              - 2 sqrt(theta B - 1) (x1 p2 - x2 p1)
    Mat expected = Mat::Zero(4, 4);
    expected(0, 0) = expected(2, 2) = 2.0 * a;
    expected(1, 1) = expected(3, 3) = 2.0 * (p.theta * p.B - 1.0);
    expected(0, 3) = expected(3, 0) = -2.0 * su;
    expected(1, 2) = expected(2, 1) = 2.0 * su;
    REQUIRE(max_abs(real.transformed.M - expected) < 1e-12);

    // same flow spectrum as the H2 structure scaled by 2 theta
    CVec e1 = Eigen::EigenSolver<Mat>(flow_matrix(real.transformed)).eigenvalues();
    CVec e2 = Eigen::EigenSolver<Mat>(
                  Mat(2.0 * p.theta * flow_matrix(catalog_nc_h2(p))))
                  .eigenvalues();
    std::vector<double> w1, w2v;
    for (int i = 0; i < 4; ++i) {
      w1.push_back(std::abs(e1(i)));
      w2v.push_back(std::abs(e2(i)));
    }
    std::sort(w1.begin(), w1.end());
    std::sort(w2v.begin(), w2v.end());
    for (int i = 0; i < 4; ++i) REQUIRE(std::abs(w1[i] - w2v[i]) < 1e-10);
  }

  SECTION("domain boundaries raise RealizationDomain") {
    REQUIRE_THROWS_AS(h2_realization(NCParams{1.0, -0.5, 2.0}),
                      RealizationDomain);
    REQUIRE_THROWS_AS(h2_realization(NCParams{1.0, 0.2, 0.5}),
                      RealizationDomain);
  }
}

TEST_CASE("compare_spectra") {
  SECTION("the two Landau charts quantize identically") {
    LandauParams lp{1.0, 1.0, 2.0, 0.0};
    ModeSpectrum a = closed_form_levels(
        normal_modes(catalog("landau_qp", lp, kDesk)), 6);
    ModeSpectrum b = closed_form_levels(
        normal_modes(catalog("landau_qu", lp, kDesk)), 6);
    ComparisonReport rep = compare_spectra(a, b, 5, 1e-12);
    REQUIRE(rep.equal);
    REQUIRE(rep.max_level_deviation < 1e-12);
  }

  SECTION("a spectrum equals itself") {
    ModeSpectrum a = h1_levels(kDesk, 3, 3);
    ComparisonReport rep = compare_spectra(a, a, 5, 1e-12);
    REQUIRE(rep.equal);
    REQUIRE(rep.max_level_deviation == 0.0);
  }

  SECTION("perturbing theta separates the spectra") {
    ModeSpectrum a = h1_levels(kDesk, 3, 3);
    ModeSpectrum b = h1_levels(NCParams{1.0, 0.25, 0.5}, 3, 3);
    ComparisonReport rep = compare_spectra(a, b, 5, 1e-9);
    REQUIRE_FALSE(rep.equal);
  }
}
