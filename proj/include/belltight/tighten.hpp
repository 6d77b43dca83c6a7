#pragma once

// Constrained projected-gradient loop that raises the quantum-to-classical
// ratio at fixed classical bound, accumulating saturating vertices until
// their affine hull pins the coefficients to a facet.
//
// One outer iteration:
//   1. classical bound + saturating configurations (tetra route), merged
//      into the vertex matrix V
//   2. stop and certify when affine_rank(V) = M - 1
//   3. g = grad_alpha / beta_C, projected onto the null space of V
//   4. vanishing projected gradient -> seeded standard-normal noise instead
//   5. trial step; if the bound drops (a facet was crossed) or the ratio
//      decreases, halve the step and retry, up to K times
//   6. rescale the coefficients so the bound is restored exactly
//
// The final certificate always re-derives the saturating set by exact
// enumeration.

#include <numeric>
#include <optional>
#include <random>

#include "classical.hpp"
#include "quantum.hpp"
#include "scenario.hpp"

namespace belltight {

struct TightenOptions {
  double step_size = 0.01;
  int max_outer = 500;
  int inner_k = 50;           // retry budget per outer iteration
  double noise_sigma = 0.01;
  double grad_eps = 1e-10;
  double rank_tol = 1e-8;
  uint64_t seed = 0;
  std::optional<Vec> origin_offset;  // shift of the functional's reference point
  double enum_budget = kDefaultEnumBudget;
  QuantumOptions quantum;
};

struct FacetCertificate {
  int affine_rank = 0;
  int design_dim = 0;
  bool is_facet = false;  // affine_rank == design_dim - 1
  // affine rank of the pairwise-extreme grid configurations saturating the
  // relaxed bound; these ignore joint achievability, so this can exceed
  // affine_rank for m >= 3 (it is the rank the reference tables certify)
  int grid_rank = 0;
  int n_saturating = 0;
  double beta_c = 0.0;
  bool exhaustive = true;  // false when the exact enumeration exceeded its budget
  std::vector<int64_t> alpha_rational;  // empty when rationalization failed
};

enum class TightenStatus { facet, max_iters, ridge_detected };

struct TrajectoryPoint {
  int iteration = 0;
  Vec alpha;
  double beta_c = 0.0;
  double beta_q = 0.0;
  double delta = 0.0;
  int rank_v = 0;
};

struct TightenResult {
  Vec alpha_final;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<Vec> vertex_matrix;  // accumulated saturating design vectors
  FacetCertificate certificate;
  TightenStatus status = TightenStatus::max_iters;
  double delta_final = 0.0;
};

// (I - V^T (V V^T)^+ V) g via a rank-revealing SVD of V.  Singular values
// below rank_tol * sigma_max are treated as zero.
inline Vec project_out(const std::vector<Vec>& V, const Vec& g, double rank_tol = 1e-8) {
  if (V.empty()) return g;
  const int M = static_cast<int>(g.size());
  Mat A(V.size(), M);
  for (size_t i = 0; i < V.size(); ++i) {
    if (V[i].size() != M) throw std::invalid_argument("project_out: column-count mismatch");
    A.row(i) = V[i];
  }
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = rank_tol * (s.size() ? s[0] : 0.0);
  Vec out = g;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] <= cut) break;
    const Vec w = svd.matrixV().col(i);
    out -= w.dot(out) * w;
  }
  return out;
}

// Rank of the difference set {v_j - v_0}.
inline int affine_rank(const std::vector<Vec>& V, double rank_tol = 1e-8) {
  if (V.empty()) throw std::invalid_argument("affine_rank: empty vertex set");
  if (V.size() == 1) return 0;
  Mat A(V.size() - 1, V[0].size());
  for (size_t i = 1; i < V.size(); ++i) A.row(i - 1) = V[i] - V[0];
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rank_tol * s[0]) ++r;
  return r;
}

struct RatioResult {
  double delta = 0.0;
  double beta_q = 0.0;
  double beta_c = 0.0;
  bool degenerate_quantum = false;
};

inline RatioResult ratio(const Vec& alpha, const Scenario& sc, const QuantumOptions& qopts = {}) {
  ClassicalResult cb = classical_bound_tetra(alpha, sc);
  if (cb.beta_c >= 0)
    throw std::runtime_error("ratio: classical bound is nonnegative (degenerate normalization)");
  QuantumSolution qs = quantum_value(alpha, sc, qopts);
  return {qs.beta_q / cb.beta_c, qs.beta_q, cb.beta_c, qs.degenerate};
}

// Smallest integer multiplier q <= max_scale for which q * alpha rounds to an
// integer vector within 1e-6 * q * |alpha|_inf, validated by identical
// normalized ratio and saturating set; the result is divided by its gcd.
inline std::optional<std::vector<int64_t>> rationalize(const Vec& alpha, const Scenario& sc,
                                                       int64_t max_scale = 10000,
                                                       double enum_budget = kDefaultEnumBudget) {
  const double norm = alpha.cwiseAbs().maxCoeff();
  if (norm == 0.0 || !alpha.allFinite()) return std::nullopt;
  for (int64_t q = 1; q <= max_scale; ++q) {
    double resid = 0.0;
    for (int i = 0; i < alpha.size(); ++i)
      resid = std::max(resid, std::abs(q * alpha[i] - std::round(q * alpha[i])));
    if (resid > 1e-6 * q * norm) continue;
    std::vector<int64_t> ints(alpha.size());
    int64_t g = 0;
    for (int i = 0; i < alpha.size(); ++i) {
      ints[i] = llround(q * alpha[i]);
      g = std::gcd(g, std::abs(ints[i]));
    }
    if (g == 0) return std::nullopt;
    for (auto& v : ints) v /= g;
    Vec ai(alpha.size());
    for (int i = 0; i < alpha.size(); ++i) ai[i] = double(ints[i]);
    // an exact positive rescaling defines the same hyperplane; nothing to validate
    bool exact_rescale = true;
    for (int i = 0; i < alpha.size(); ++i)
      if (alpha[i] * double(q) != ai[i] * double(g)) { exact_rescale = false; break; }
    if (exact_rescale) return ints;
    // validation: same normalized ratio and same saturating vertex set
    try {
      ClassicalResult cb_f = classical_bound_tetra(alpha, sc);
      ClassicalResult cb_i = classical_bound_tetra(ai, sc);
      if (cb_f.beta_c >= 0 || cb_i.beta_c >= 0) return ints;  // nothing to normalize against
      auto sat_f = saturating_vertices(alpha, sc, cb_f.beta_c,
                                       saturation_tol(alpha, cb_f.beta_c), enum_budget);
      auto sat_i = saturating_vertices(ai, sc, cb_i.beta_c, 1e-9, enum_budget);
      if (sat_f.size() != sat_i.size()) continue;
      std::set<std::vector<int64_t>> kf, ki;
      for (const auto& v : sat_f) kf.insert(detail::design_key(v));
      for (const auto& v : sat_i) ki.insert(detail::design_key(v));
      if (kf != ki) continue;
      // normalized functionals must agree on the saturating set: alpha/|bC|
      // and ints/|bC_i| define the same hyperplane when the sets match, so a
      // ratio check on one vertex suffices
      const Vec& v0 = sat_i.front();
      const double r_f = functional_value(alpha, v0) / cb_f.beta_c;
      const double r_i = functional_value(ai, v0) / cb_i.beta_c;
      if (std::abs(r_f - r_i) > 1e-9) continue;
    } catch (const std::runtime_error&) {
      return ints;  // enumeration out of budget: return unvalidated candidate
    }
    return ints;
  }
  return std::nullopt;
}

inline FacetCertificate certify_facet(const Vec& alpha, const Scenario& sc,
                                      double rank_tol = 1e-8,
                                      double enum_budget = kDefaultEnumBudget) {
  FacetCertificate cert;
  cert.design_dim = sc.design_dim();
  std::vector<Vec> sat;
  try {
    ClassicalResult cb = classical_bound_exact(alpha, sc, enum_budget);
    cert.beta_c = cb.beta_c;
    sat = cb.minimizer_designs;
    cert.exhaustive = true;
  } catch (const std::runtime_error&) {
    ClassicalResult cb = classical_bound_tetra(alpha, sc);
    cert.beta_c = cb.beta_c;
    sat = cb.minimizer_designs;
    cert.exhaustive = false;
  }
  cert.n_saturating = static_cast<int>(sat.size());
  cert.affine_rank = affine_rank(sat, rank_tol);
  cert.is_facet = cert.affine_rank == cert.design_dim - 1;
  const std::vector<Vec> grid_sat = pairwise_extreme_saturators(alpha, sc);
  cert.grid_rank = grid_sat.empty() ? 0 : affine_rank(grid_sat, rank_tol);
  if (auto r = rationalize(alpha, sc, 10000, enum_budget)) cert.alpha_rational = *r;
  return cert;
}

namespace detail {

inline void merge_rows(std::vector<Vec>& V, std::set<std::vector<int64_t>>& keys,
                       const std::vector<Vec>& add) {
  for (const auto& v : add)
    if (keys.insert(design_key(v)).second) V.push_back(v);
}

}  // namespace detail

inline TightenResult tighten(const Vec& alpha0, const Scenario& sc, TightenOptions opts = {}) {
  sc.validate();
  if (alpha0.size() != sc.design_dim())
    throw std::invalid_argument("tighten: dimension mismatch");
  const int M = sc.design_dim();
  const Vec origin = opts.origin_offset.value_or(Vec::Zero(M));

  // Classical bound of the (possibly origin-shifted) functional and the
  // saturating configurations, from the fast tetra route.
  auto bound = [&](const Vec& a) {
    ClassicalResult cb = classical_bound_tetra(a, sc);
    cb.beta_c -= functional_value(a, origin);
    for (auto& d : cb.minimizer_designs) d -= origin;
    return cb;
  };

  Vec alpha = alpha0;
  ClassicalResult cb0 = bound(alpha);
  if (cb0.beta_c >= 0)
    throw std::runtime_error("tighten: starting coefficients give a nonnegative classical bound");
  const double beta_fixed = cb0.beta_c;

  TightenResult res;
  std::set<std::vector<int64_t>> keys;
  detail::merge_rows(res.vertex_matrix, keys, cb0.minimizer_designs);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  QuantumOptions qopts = opts.quantum;
  qopts.seed = opts.seed;
  QuantumSolution qs = quantum_value(alpha, sc, qopts);
  double delta = qs.beta_q / beta_fixed;

  int stall = 0;
  double step = opts.step_size;
  res.status = TightenStatus::max_iters;

  // Full vertex list for the pivot step, fetched lazily; empty optional means
  // the enumeration exceeded its budget and pivoting is unavailable.
  std::optional<std::vector<Vec>> all_designs;
  bool tried_enum = false;
  auto fetch_designs = [&]() -> const std::optional<std::vector<Vec>>& {
    if (!tried_enum) {
      tried_enum = true;
      try {
        std::vector<Vec> rows;
        // capped below the general budget: the full list is held in memory
        enumerate_vertices(
            sc, [&](const Vertex& v) { rows.push_back(v.design - origin); },
            std::min(opts.enum_budget, 2e6));
        all_designs = std::move(rows);
      } catch (const std::runtime_error&) {
      }
    }
    return all_designs;
  };

  // Pivot step: rotate the hyperplane about the affine hull of the current
  // contacts until it touches a new vertex (exact ratio test).  The quantum
  // value is concave in the coefficients, so the better of the two rotation
  // endpoints never lowers the ratio, and every pivot raises the contact
  // rank, reaching a facet in at most M - 1 steps.
  auto attempt_pivot = [&]() -> bool {
    bool pivoted = false;
    {
      if (const auto& dsp = fetch_designs()) {
        const auto& ds = *dsp;
        const double ctol = 1e-9 * std::max(1.0, std::abs(beta_fixed));
        for (const auto& u : ds)
          if (alpha.dot(u) - beta_fixed <= ctol) detail::merge_rows(res.vertex_matrix, keys, {u});
        // projector onto the orthogonal complement of the contact rows
        Mat P = Mat::Identity(M, M);
        {
          Mat A(res.vertex_matrix.size(), M);
          for (size_t i = 0; i < res.vertex_matrix.size(); ++i) A.row(i) = res.vertex_matrix[i];
          Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinV);
          const auto& sv = svd.singularValues();
          const double cut = opts.rank_tol * (sv.size() ? sv[0] : 0.0);
          for (int i = 0; i < sv.size() && sv[i] > cut; ++i)
            P -= svd.matrixV().col(i) * svd.matrixV().col(i).transpose();
        }
        std::vector<int> targets;
        for (size_t i = 0; i < ds.size(); ++i)
          if (alpha.dot(ds[i]) - beta_fixed > ctol && (P * ds[i]).norm() > 1e-8 * ds[i].norm())
            targets.push_back(static_cast<int>(i));
        if (!targets.empty()) {
          std::uniform_int_distribution<size_t> pick(0, targets.size() - 1);
          const Vec w = (P * ds[targets[pick(rng)]]).normalized();
          double best_dt = delta - 1e-9;
          Vec best_alpha;
          QuantumSolution best_qs;
          bool have = false;
          for (double sgn : {-1.0, 1.0}) {
            double tmax = std::numeric_limits<double>::infinity();
            for (int i : targets) {
              const double du = sgn * w.dot(ds[i]);
              if (du < -1e-12) tmax = std::min(tmax, (alpha.dot(ds[i]) - beta_fixed) / (-du));
            }
            if (!std::isfinite(tmax) || tmax <= 0) continue;
            Vec trial = alpha + sgn * tmax * w;
            ClassicalResult cbp = bound(trial);
            if (cbp.beta_c < -1e-300) trial *= beta_fixed / cbp.beta_c;
            QuantumOptions q2 = qopts;
            q2.extra_starts = {qs.theta_star.theta};
            q2.n_starts = std::min(q2.n_starts, 4);
            QuantumSolution qt = quantum_value(trial, sc, q2);
            const double dt = qt.beta_q / beta_fixed;
            if (dt > best_dt) {
              best_dt = dt;
              best_alpha = trial;
              best_qs = qt;
              have = true;
            }
          }
          if (have) {
            alpha = best_alpha;
            qs = best_qs;
            delta = std::max(delta, best_dt);
            detail::merge_rows(res.vertex_matrix, keys, bound(alpha).minimizer_designs);
            stall = 0;
            pivoted = true;
          }
        }
      }
    }
    return pivoted;
  };

  int since_growth = 0;
  size_t n_rows = res.vertex_matrix.size();
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    if (res.vertex_matrix.size() > n_rows) {
      n_rows = res.vertex_matrix.size();
      since_growth = 0;
    }
    const int rank = affine_rank(res.vertex_matrix, opts.rank_tol);
    res.trajectory.push_back({outer, alpha, beta_fixed, qs.beta_q, delta, rank});
    if (rank == M - 1) {
      res.status = TightenStatus::facet;
      break;
    }
    // the ascent must keep recruiting contacts; when it plateaus without new
    // ones, jump straight onto the next face
    if (++since_growth >= 15 && attempt_pivot()) {
      since_growth = 0;
      continue;
    }

    Vec g = grad_alpha(alpha, qs.theta_star.theta, qs.ground_state, sc) / beta_fixed;
    Vec pg = project_out(res.vertex_matrix, g, opts.rank_tol);
    double s = step;
    if (pg.norm() <= opts.grad_eps) {
      // Saddle: the quantum point sits in the span of the saturators, so the
      // projected gradient carries no information; pivot to a new contact.
      if (attempt_pivot()) continue;
      // No pivot available: a projected random kick preserves the contacts
      // and, by the same concavity, cannot lower the ratio, so it is applied
      // at full scale rather than through the gradient step.
      Vec noise(M);
      for (int i = 0; i < M; ++i) noise[i] = opts.noise_sigma * gauss(rng);
      pg = project_out(res.vertex_matrix, noise, opts.rank_tol);
      s = 1.0;
    }

    bool accepted = false;
    for (int t = 0; t < opts.inner_k; ++t) {
      Vec trial = alpha + s * pg;
      ClassicalResult cb = bound(trial);
      if (cb.beta_c < beta_fixed - 1e-9 * std::abs(beta_fixed)) {
        s *= 0.5;  // crossed another facet
        continue;
      }
      // restore the bound exactly (the projector preserves it only to
      // first order once new vertices are about to join)
      if (cb.beta_c < -1e-300) trial *= beta_fixed / cb.beta_c;
      cb = bound(trial);

      QuantumOptions q2 = qopts;
      q2.extra_starts = {qs.theta_star.theta};  // warm start keeps the branch
      q2.n_starts = std::min(q2.n_starts, 4);   // trials lean on the warm start
      QuantumSolution qt = quantum_value(trial, sc, q2);
      const double dt = qt.beta_q / beta_fixed;
      if (dt < delta - 1e-12) {
        s *= 0.5;
        continue;
      }
      stall = 0;
      alpha = trial;
      qs = qt;
      delta = dt;
      detail::merge_rows(res.vertex_matrix, keys, cb.minimizer_designs);
      accepted = true;
      break;
    }
    // a rejected line search means the ascent direction is exhausted;
    // pivoting onto a new contact makes progress the gradient cannot
    if (!accepted && attempt_pivot()) continue;
    if (!accepted) ++stall;
    if (stall >= 20 && affine_rank(res.vertex_matrix, opts.rank_tol) < M - 1) {
      res.status = TightenStatus::ridge_detected;
      break;
    }
  }

  res.alpha_final = alpha;
  res.certificate = certify_facet(alpha, sc, opts.rank_tol, opts.enum_budget);
  // A successful rationalization gives the exact facet; report its ratio.
  if (!res.certificate.alpha_rational.empty()) {
    Vec ai(M);
    for (int i = 0; i < M; ++i) ai[i] = double(res.certificate.alpha_rational[i]);
    try {
      res.delta_final = ratio(ai, sc, qopts).delta;
    } catch (const std::runtime_error&) {
      res.delta_final = delta;
    }
  } else {
    res.delta_final = delta;
  }
  if (res.certificate.is_facet) res.status = TightenStatus::facet;
  return res;
}

}  // namespace belltight
