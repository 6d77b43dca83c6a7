#pragma once

// Benchmark predicates for the (2,2,2) correlator sets (local polytope,
// arcsin-form quantum set, their symmetric reductions and polar duals) and
// 2-D primal/dual cross-section scanning.

#include <array>
#include <limits>

#include "classical.hpp"
#include "quantum.hpp"
#include "scenario.hpp"

namespace belltight {

struct Corr222 {
  double c00, c01, c10, c11;  // <A_k B_l>
};

struct SymCorr222 {
  double s00, s01, s11;  // symmetrized cross term in s01
};

// All eight CHSH-form inequalities, |sum with one flipped sign| <= 2.
inline bool local222_membership(const Corr222& c, double tol = 1e-12) {
  const std::array<double, 4> v{c.c00, c.c01, c.c10, c.c11};
  for (int flip = 0; flip < 4; ++flip) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (i == flip ? -v[i] : v[i]);
    if (std::abs(s) > 2.0 + tol) return false;
  }
  return true;
}

// The arcsin characterization of the (2,2,2) quantum set.
inline bool quantum222_membership(const Corr222& c, double tol = 1e-10) {
  const std::array<double, 4> v{c.c00, c.c01, c.c10, c.c11};
  for (double x : v)
    if (std::abs(x) > 1.0 + tol)
      throw std::invalid_argument("quantum222_membership: correlator outside [-1,1]");
  std::array<double, 4> a;
  for (int i = 0; i < 4; ++i) a[i] = std::asin(std::clamp(v[i], -1.0, 1.0));
  for (int flip = 0; flip < 4; ++flip) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (i == flip ? -a[i] : a[i]);
    if (std::abs(s) > M_PI + tol) return false;
  }
  return true;
}

// |s01| <= 1 - |s00 - s11| / 2
inline bool sym222_polytope_membership(const SymCorr222& s, double tol = 1e-10) {
  return std::abs(s.s01) <= 1.0 - 0.5 * std::abs(s.s00 - s.s11) + tol;
}

// |s01 (s00 - s11)| <= sqrt(1 - s01^2) [sqrt(1 - s00^2) + sqrt(1 - s11^2)]
inline bool sym222_quantum_membership(const SymCorr222& s, double tol = 1e-10) {
  if (std::abs(s.s00) > 1 + tol || std::abs(s.s01) > 1 + tol || std::abs(s.s11) > 1 + tol)
    return false;
  auto root = [](double x) { return std::sqrt(std::max(0.0, 1.0 - x * x)); };
  return std::abs(s.s01 * (s.s00 - s.s11)) <=
         root(s.s01) * (root(s.s00) + root(s.s11)) + tol;
}

// sqrt((l00 - l11)^2 + l01^2) <= 1  and  |l00 + l11| + |l01| <= 1.
// Closed-form outer bound on the dual of the symmetric quantum set; it is
// exact on the coordinate axes and the CHSH directions but admits points
// whose support value dips a few percent below -1 in generic directions
// (the exact dual radius along a ray is -1/beta_Q).
inline bool dual222_quantum_membership(double l00, double l01, double l11,
                                       double tol = 1e-10) {
  if (!std::isfinite(l00) || !std::isfinite(l01) || !std::isfinite(l11)) return false;
  const double c1 = std::sqrt((l00 - l11) * (l00 - l11) + l01 * l01);
  const double c2 = std::abs(l00 + l11) + std::abs(l01);
  return c1 <= 1.0 + tol && c2 <= 1.0 + tol;
}

struct SectionSample {
  double phi = 0.0;
  double beta_c = 0.0;
  double beta_q = 0.0;
  double r_dual_c = 0.0;  // -1/beta_c where beta_c < 0, +inf otherwise
  double r_dual_q = 0.0;
  bool dual_c_unbounded = false;
  bool dual_q_unbounded = false;
};

struct SectionCurve {
  std::vector<SectionSample> samples;
  std::vector<std::array<double, 2>> projected_vertices;  // (alpha1.d, alpha2.d)
  std::vector<int> hull;  // indices into projected_vertices, counterclockwise
};

namespace detail {

// Andrew monotone chain on the projected vertex cloud.
inline std::vector<int> convex_hull_2d(const std::vector<std::array<double, 2>>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return pts[a] < pts[b]; });
  auto cross = [&](int o, int a, int b) {
    return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) -
           (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
  };
  std::vector<int> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const size_t base = hull.size();
    for (int i : idx) {
      while (hull.size() >= base + 2 &&
             cross(hull[hull.size() - 2], hull.back(), i) <= 0)
        hull.pop_back();
      hull.push_back(i);
    }
    hull.pop_back();
    std::reverse(idx.begin(), idx.end());
  }
  return hull;
}

}  // namespace detail

// Checks linear independence of the section plane; returns the component of
// alpha2 orthogonal to alpha1 (used only for the degeneracy test).
inline Vec project_direction(const Vec& alpha1, const Vec& alpha2) {
  const double n1 = alpha1.norm();
  if (n1 == 0) throw std::invalid_argument("cross_section: alpha1 is zero");
  Vec r = alpha2 - alpha1.dot(alpha2) / (n1 * n1) * alpha1;
  if (r.norm() <= 1e-12 * std::max(1.0, alpha2.norm()))
    throw std::invalid_argument("cross_section: directions are linearly dependent");
  return r;
}

// Scans u(phi) = cos(phi) a1 + sin(phi) a2 over a uniform phi grid, recording
// the classical bound (tetra, oracle-verified within budget), the quantum
// value, and the polar dual radii.  Also projects every vertex to the
// (a1.d, a2.d) plane and computes the 2-D hull.
inline SectionCurve cross_section(const Vec& alpha1, const Vec& alpha2, const Scenario& sc,
                                  int n_phi = 720, const QuantumOptions& qopts = {},
                                  double enum_budget = 1e6) {
  if (alpha1.size() != sc.design_dim() || alpha2.size() != sc.design_dim())
    throw std::invalid_argument("cross_section: dimension mismatch");
  (void)project_direction(alpha1, alpha2);  // rejects degenerate spans
  SectionCurve curve;
  for (int i = 0; i < n_phi; ++i) {
    const double phi = 2.0 * M_PI * i / n_phi;
    Vec u = std::cos(phi) * alpha1 + std::sin(phi) * alpha2;
    SectionSample s;
    s.phi = phi;
    ClassicalResult cb = classical_bound_tetra(u, sc);
    s.beta_c = cb.beta_c;
    s.beta_q = quantum_value(u, sc, qopts).beta_q;
    if (s.beta_c < 0) s.r_dual_c = -1.0 / s.beta_c;
    else { s.r_dual_c = std::numeric_limits<double>::infinity(); s.dual_c_unbounded = true; }
    // the collective-spin value is variational and its subspace misses the
    // non-aligned product states, so the quantum support never exceeds the
    // classical one; the dual radius uses the tighter of the two bounds
    const double bq = std::min(s.beta_q, s.beta_c);
    if (bq < 0) s.r_dual_q = -1.0 / bq;
    else { s.r_dual_q = std::numeric_limits<double>::infinity(); s.dual_q_unbounded = true; }
    curve.samples.push_back(s);
  }
  if (composition_count(sc.n_parties, sc.n_strategies()) <= enum_budget) {
    std::set<std::array<int64_t, 2>> seen;
    enumerate_vertices(sc, [&](const Vertex& v) {
      const double x = functional_value(alpha1, v.design);
      const double y = functional_value(alpha2, v.design);
      if (seen.insert({llround(1e9 * x), llround(1e9 * y)}).second)
        curve.projected_vertices.push_back({x, y});
    }, enum_budget);
    curve.hull = detail::convex_hull_2d(curve.projected_vertices);
  }
  return curve;
}

}  // namespace belltight
