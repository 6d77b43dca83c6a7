#include <belltight/geometry.hpp>
#include <catch2/catch_amalgamated.hpp>
#include <random>

using namespace belltight;

TEST_CASE("local polytope membership in the two-party scenario") {
  CHECK(local222_membership({1, 1, 1, 1}));
  CHECK(local222_membership({1, -1, 1, -1}));       // deterministic vertex
  CHECK_FALSE(local222_membership({1, 1, 1, -1}));  // nonlocal extremal box
  const double r = 1.0 / std::sqrt(2.0);
  CHECK_FALSE(local222_membership({r, r, r, -r}));  // Tsirelson point violates CHSH
  CHECK(local222_membership({0.5, 0.5, 0.5, -0.4}));
}

TEST_CASE("quantum set membership in the two-party scenario") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(quantum222_membership({r, r, r, -r}));          // on the boundary
  CHECK_FALSE(quantum222_membership({0.9, 0.9, 0.9, -0.9}));
  CHECK(quantum222_membership({1, 1, 1, 1}));
  CHECK_THROWS_AS(quantum222_membership({1.5, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("local points are quantum points") {
  std::mt19937_64 rng(29);
  std::exponential_distribution<double> ex(1.0);
  // random convex combinations of the 16 deterministic vertices
  for (int rep = 0; rep < 500; ++rep) {
    double w[16], tot = 0;
    for (double& x : w) tot += (x = ex(rng));
    Corr222 c{0, 0, 0, 0};
    for (int v = 0; v < 16; ++v) {
      const int a0 = (v & 1) ? -1 : 1, a1 = (v & 2) ? -1 : 1;
      const int b0 = (v & 4) ? -1 : 1, b1 = (v & 8) ? -1 : 1;
      const double p = w[v] / tot;
      c.c00 += p * a0 * b0;
      c.c01 += p * a0 * b1;
      c.c10 += p * a1 * b0;
      c.c11 += p * a1 * b1;
    }
    CHECK(local222_membership(c));
    CHECK(quantum222_membership(c));
  }
}

TEST_CASE("symmetric polytope and quantum set") {
  CHECK(sym222_polytope_membership({1, 1, 1}));
  CHECK(sym222_polytope_membership({1, 0, -1}));
  CHECK_FALSE(sym222_polytope_membership({1, 0.9, -1}));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(sym222_quantum_membership({r, r, -r}));
  CHECK_FALSE(sym222_quantum_membership({0.95, 0.95, -0.95}));
  CHECK_FALSE(sym222_quantum_membership({1.5, 0, 0}));
  // symmetric polytope points are symmetric quantum points
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int rep = 0; rep < 500; ++rep) {
    SymCorr222 s{u(rng), u(rng), u(rng)};
    if (sym222_polytope_membership(s, 0.0)) CHECK(sym222_quantum_membership(s));
  }
}

TEST_CASE("dual quantum set") {
  CHECK(dual222_quantum_membership(0.25, 0.5, -0.25));  // normalized CHSH direction
  CHECK(dual222_quantum_membership(0.5, 0, 0.5));
  CHECK_FALSE(dual222_quantum_membership(0.6, 0.6, -0.6));
  CHECK_FALSE(dual222_quantum_membership(std::nan(""), 0, 0));
}

TEST_CASE("convex hull of a planar point set") {
  std::vector<std::array<double, 2>> pts = {
      {0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.8}};
  auto hull = detail::convex_hull_2d(pts);
  CHECK(hull.size() == 4);
  std::set<int> s(hull.begin(), hull.end());
  CHECK(s == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("degenerate section planes are rejected") {
  Scenario sc(2, 2);
  Vec a1(5), a2(5);
  a1 << 0, 0, 1, 1, -1;
  a2 = 2.0 * a1;
  CHECK_THROWS_AS(cross_section(a1, a2, sc, 8), std::invalid_argument);
  CHECK_THROWS_AS(cross_section(Vec::Zero(5), a1, sc, 8), std::invalid_argument);
  CHECK_THROWS_AS(cross_section(Vec::Zero(4), Vec::Zero(4), sc, 8), std::invalid_argument);
}

TEST_CASE("cross-section of the two-party symmetric plane") {
  // plane through the symmetrized CHSH facet directions
  Scenario sc(2, 2);
  Vec a1(5), a2(5);
  a1 << 0, 0, 0.5, 0.5, -0.5;
  a2 << 0, 0, -0.5, 0.5, 0.5;
  SectionCurve curve = cross_section(a1, a2, sc, 72);
  REQUIRE(curve.samples.size() == 72);
  for (const auto& s : curve.samples) {
    if (!s.dual_c_unbounded && !s.dual_q_unbounded) {
      CHECK(s.beta_q <= s.beta_c + 1e-9);
      CHECK(s.r_dual_q <= s.r_dual_c + 1e-9);  // quantum dual inside local dual
    }
  }
  // at phi = 0 the section hits the scaled CHSH facet: beta_c = -1, dual radius 1
  CHECK(curve.samples[0].beta_c == Catch::Approx(-1.0).margin(1e-9));
  CHECK(curve.samples[0].r_dual_c == Catch::Approx(1.0).margin(1e-9));
  CHECK(curve.samples[0].beta_q == Catch::Approx(-std::sqrt(2.0)).margin(1e-9));
  // projected vertex cloud and hull are populated for this tiny scenario
  CHECK(curve.projected_vertices.size() > 0);
  CHECK(curve.hull.size() >= 3);
}
