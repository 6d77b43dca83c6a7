#pragma once

// Exact classical bounds of the symmetric local polytope and the sets of
// vertices saturating them.  Two independent routes:
//
//  * classical_bound_exact: depth-first enumeration of all compositions of N
//    into 2^m single-party strategies, with branch-and-bound pruning against
//    the incumbent minimum (interval bound on the remaining contribution).
//
//  * classical_bound_tetra: grid over S_k in {-N,...,N} (step 2) with the
//    Z_kl part minimized at tetrahedron extremes.  For m != 3 each Z_kl is
//    set independently to its extreme (Z_kl = N - |S_k - S_l| for a_kl > 0,
//    Z_kl = -N + |S_k + S_l| for a_kl < 0, either when a_kl = 0), which
//    relaxes joint achievability, so tetra <= exact.  For m = 3 the joint
//    constraint is enforced through the four strategy-class masses, making
//    the grid route agree with exact enumeration.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "scenario.hpp"

namespace belltight {

struct Vertex {
  std::vector<int> counts;  // parties per strategy, length 2^m
  std::vector<int> S;       // S_k, length m
  std::vector<int> Z;       // Z_kl, m x m row-major
  Vec design;               // integer-valued design vector, length M

  static Vertex from_counts(const std::vector<int>& counts, const Scenario& sc) {
    const int m = sc.n_settings;
    const int N = sc.n_parties;
    if (static_cast<int>(counts.size()) != sc.n_strategies())
      throw std::invalid_argument("Vertex: wrong number of strategy counts");
    int total = 0;
    for (int c : counts) {
      if (c < 0) throw std::invalid_argument("Vertex: negative count");
      total += c;
    }
    if (total != N) throw std::invalid_argument("Vertex: counts must sum to N");
    Vertex v;
    v.counts = counts;
    v.S.assign(m, 0);
    v.Z.assign(m * m, 0);
    for (int s = 0; s < sc.n_strategies(); ++s) {
      if (counts[s] == 0) continue;
      for (int k = 0; k < m; ++k) {
        const int sk = ((s >> k) & 1) ? -1 : 1;
        v.S[k] += counts[s] * sk;
        for (int l = 0; l < m; ++l) {
          const int sl = ((s >> l) & 1) ? -1 : 1;
          v.Z[k * m + l] += counts[s] * sk * sl;
        }
      }
    }
    v.design = design_from_SZ(v.S, v.Z, sc);
    return v;
  }

  static Vec design_from_SZ(const std::vector<int>& S, const std::vector<int>& Z,
                            const Scenario& sc) {
    const int m = sc.n_settings;
    Vec d(sc.design_dim());
    for (int k = 0; k < m; ++k) d[k] = S[k];
    for (int k = 0; k < m; ++k)
      for (int l = k; l < m; ++l) {
        if (k == l)
          d[pair_index(m, k, k)] = 0.5 * (double(S[k]) * S[k] - sc.n_parties);
        else
          d[pair_index(m, k, l)] = double(S[k]) * S[l] - Z[k * m + l];
      }
    return d;
  }
};

enum class BoundMethod { exact, tetra };

struct ClassicalResult {
  double beta_c = 0.0;
  BoundMethod method = BoundMethod::exact;
  bool integral = false;    // coefficients were integers; beta_c is exact
  bool degenerate = false;  // beta_c == 0 (e.g. all-zero coefficients)
  std::vector<Vertex> minimizers;        // exact method only
  std::vector<Vec> minimizer_designs;    // deduplicated, both methods
};

inline double composition_count(int N, int parts) {
  // C(N + parts - 1, parts - 1)
  double c = 1.0;
  for (int i = 1; i < parts; ++i) c = c * (N + i) / i;
  return c;
}

constexpr double kDefaultEnumBudget = 1e8;

inline double saturation_tol(const Vec& alpha, double beta_c) {
  return is_integral(alpha) ? 1e-9 : 1e-9 * std::max(1.0, std::abs(beta_c));
}

namespace detail {

// Interval lower bound on the functional given partial sums (Sp, Zp) and R
// parties still to assign among the strategy suffix [j, 2^m).
struct SuffixRange {
  // min/max of s_k and s_k*s_l over strategies in the suffix
  std::vector<int> s_lo, s_hi;    // length m
  std::vector<int> zz_lo, zz_hi;  // m*m row-major, k<l used
};

inline std::vector<SuffixRange> suffix_ranges(const Scenario& sc) {
  const int m = sc.n_settings;
  const int n = sc.n_strategies();
  std::vector<SuffixRange> out(n + 1);
  out[n].s_lo.assign(m, 2);
  out[n].s_hi.assign(m, -2);
  out[n].zz_lo.assign(m * m, 2);
  out[n].zz_hi.assign(m * m, -2);
  for (int j = n - 1; j >= 0; --j) {
    out[j] = out[j + 1];
    for (int k = 0; k < m; ++k) {
      const int sk = ((j >> k) & 1) ? -1 : 1;
      out[j].s_lo[k] = std::min(out[j].s_lo[k], sk);
      out[j].s_hi[k] = std::max(out[j].s_hi[k], sk);
      for (int l = k + 1; l < m; ++l) {
        const int sl = ((j >> l) & 1) ? -1 : 1;
        out[j].zz_lo[k * m + l] = std::min(out[j].zz_lo[k * m + l], sk * sl);
        out[j].zz_hi[k * m + l] = std::max(out[j].zz_hi[k * m + l], sk * sl);
      }
    }
  }
  return out;
}

inline double interval_lower_bound(const Vec& alpha, const Scenario& sc,
                                   const std::vector<int>& Sp, const std::vector<int>& Zp,
                                   int R, const SuffixRange& rng) {
  const int m = sc.n_settings;
  const int N = sc.n_parties;
  double bound = 0.0;
  std::vector<double> lo(m), hi(m);
  for (int k = 0; k < m; ++k) {
    lo[k] = Sp[k] + double(R) * rng.s_lo[k];
    hi[k] = Sp[k] + double(R) * rng.s_hi[k];
    // one-body
    bound += alpha[k] >= 0 ? alpha[k] * lo[k] : alpha[k] * hi[k];
    // diagonal two-body
    double sqlo, sqhi;
    if (lo[k] <= 0 && 0 <= hi[k]) sqlo = 0;
    else sqlo = std::min(lo[k] * lo[k], hi[k] * hi[k]);
    sqhi = std::max(lo[k] * lo[k], hi[k] * hi[k]);
    const double akk = alpha[pair_index(m, k, k)];
    bound += 0.5 * (akk >= 0 ? akk * (sqlo - N) : akk * (sqhi - N));
  }
  for (int k = 0; k < m; ++k)
    for (int l = k + 1; l < m; ++l) {
      const double a = alpha[pair_index(m, k, l)];
      if (a == 0) continue;
      const double p1 = lo[k] * lo[l], p2 = lo[k] * hi[l], p3 = hi[k] * lo[l], p4 = hi[k] * hi[l];
      const double plo = std::min(std::min(p1, p2), std::min(p3, p4));
      const double phi = std::max(std::max(p1, p2), std::max(p3, p4));
      const double zlo = Zp[k * m + l] + double(R) * rng.zz_lo[k * m + l];
      const double zhi = Zp[k * m + l] + double(R) * rng.zz_hi[k * m + l];
      bound += a >= 0 ? a * (plo - zhi) : a * (phi - zlo);
    }
  return bound;
}

}  // namespace detail

// Streams every composition of N into 2^m strategy counts exactly once.
// Refuses up front when the composition count exceeds the budget.
inline void enumerate_vertices(const Scenario& sc,
                               const std::function<void(const Vertex&)>& visit,
                               double budget = kDefaultEnumBudget) {
  sc.validate();
  const double total = composition_count(sc.n_parties, sc.n_strategies());
  if (total > budget)
    throw std::runtime_error(
        "enumerate_vertices: composition count " + std::to_string(total) +
        " exceeds enumeration budget " + std::to_string(budget));
  const int n = sc.n_strategies();
  std::vector<int> counts(n, 0);
  std::function<void(int, int)> rec = [&](int j, int rem) {
    if (j == n - 1) {
      counts[j] = rem;
      visit(Vertex::from_counts(counts, sc));
      return;
    }
    for (int c = rem; c >= 0; --c) {
      counts[j] = c;
      rec(j + 1, rem - c);
    }
  };
  rec(0, sc.n_parties);
}

namespace detail {

// Shared pruned scan.  Visits (value, counts, S, Z) of every vertex whose
// value can be <= limit(), where limit() tracks the incumbent.
template <class Leaf>
inline void pruned_scan(const Vec& alpha, const Scenario& sc, double budget,
                        const std::function<double()>& limit, Leaf&& leaf) {
  const double total = composition_count(sc.n_parties, sc.n_strategies());
  if (total > budget)
    throw std::runtime_error(
        "classical bound: composition count " + std::to_string(total) +
        " exceeds enumeration budget " + std::to_string(budget));
  const int m = sc.n_settings;
  const int n = sc.n_strategies();
  const auto ranges = suffix_ranges(sc);
  std::vector<int> counts(n, 0), S(m, 0), Z(m * m, 0);

  auto value_of = [&](const std::vector<int>& Sv, const std::vector<int>& Zv) {
    double v = 0.0;
    for (int k = 0; k < m; ++k) {
      v += alpha[k] * Sv[k];
      v += 0.5 * alpha[pair_index(m, k, k)] * (double(Sv[k]) * Sv[k] - sc.n_parties);
      for (int l = k + 1; l < m; ++l)
        v += alpha[pair_index(m, k, l)] * (double(Sv[k]) * Sv[l] - Zv[k * m + l]);
    }
    return v;
  };

  std::function<void(int, int)> rec = [&](int j, int rem) {
    if (rem > 0 && interval_lower_bound(alpha, sc, S, Z, rem, ranges[j]) > limit()) return;
    if (j == n - 1) {
      counts[j] = rem;
      for (int k = 0; k < m && rem > 0; ++k) {
        const int sk = ((j >> k) & 1) ? -1 : 1;
        S[k] += rem * sk;
        for (int l = 0; l < m; ++l) {
          const int sl = ((j >> l) & 1) ? -1 : 1;
          Z[k * m + l] += rem * sk * sl;
        }
      }
      leaf(value_of(S, Z), counts, S, Z);
      for (int k = 0; k < m && rem > 0; ++k) {
        const int sk = ((j >> k) & 1) ? -1 : 1;
        S[k] -= rem * sk;
        for (int l = 0; l < m; ++l) {
          const int sl = ((j >> l) & 1) ? -1 : 1;
          Z[k * m + l] -= rem * sk * sl;
        }
      }
      counts[j] = 0;
      return;
    }
    for (int c = rem; c >= 0; --c) {
      counts[j] = c;
      if (c > 0) {
        for (int k = 0; k < m; ++k) {
          const int sk = ((j >> k) & 1) ? -1 : 1;
          S[k] += c * sk;
          for (int l = 0; l < m; ++l) {
            const int sl = ((j >> l) & 1) ? -1 : 1;
            Z[k * m + l] += c * sk * sl;
          }
        }
      }
      rec(j + 1, rem - c);
      if (c > 0) {
        for (int k = 0; k < m; ++k) {
          const int sk = ((j >> k) & 1) ? -1 : 1;
          S[k] -= c * sk;
          for (int l = 0; l < m; ++l) {
            const int sl = ((j >> l) & 1) ? -1 : 1;
            Z[k * m + l] -= c * sk * sl;
          }
        }
      }
    }
    counts[j] = 0;
  };
  rec(0, sc.n_parties);
}

inline std::vector<int64_t> design_key(const Vec& d) {
  std::vector<int64_t> key(d.size());
  for (int i = 0; i < d.size(); ++i) key[i] = llround(d[i]);
  return key;
}

}  // namespace detail

inline ClassicalResult classical_bound_exact(const Vec& alpha, const Scenario& sc,
                                             double budget = kDefaultEnumBudget) {
  sc.validate();
  if (alpha.size() != sc.design_dim())
    throw std::invalid_argument("classical_bound_exact: dimension mismatch");
  ClassicalResult res;
  res.method = BoundMethod::exact;
  res.integral = is_integral(alpha);

  double best = std::numeric_limits<double>::infinity();
  struct Hit {
    double value;
    std::vector<int> counts;
  };
  std::vector<Hit> hits;
  auto tol = [&]() { return saturation_tol(alpha, best); };
  auto limit = [&]() { return best + tol(); };

  detail::pruned_scan(alpha, sc, budget, limit,
                      [&](double v, const std::vector<int>& counts, const std::vector<int>&,
                          const std::vector<int>&) {
                        if (v < best) {
                          best = v;
                          // drop hits that no longer qualify
                          std::erase_if(hits, [&](const Hit& h) { return h.value > best + tol(); });
                        }
                        if (v <= best + tol()) hits.push_back({v, counts});
                      });

  res.beta_c = res.integral ? std::round(best) : best;
  res.degenerate = std::abs(res.beta_c) <= tol();
  std::set<std::vector<int64_t>> seen;
  for (const auto& h : hits) {
    if (h.value > res.beta_c + tol()) continue;
    Vertex v = Vertex::from_counts(h.counts, sc);
    if (seen.insert(detail::design_key(v.design)).second) {
      res.minimizer_designs.push_back(v.design);
      res.minimizers.push_back(std::move(v));
    }
  }
  return res;
}

inline ClassicalResult classical_bound_tetra(const Vec& alpha, const Scenario& sc) {
  sc.validate();
  if (alpha.size() != sc.design_dim())
    throw std::invalid_argument("classical_bound_tetra: dimension mismatch");
  const int m = sc.n_settings;
  const int N = sc.n_parties;
  ClassicalResult res;
  res.method = BoundMethod::tetra;
  res.integral = is_integral(alpha);

  double best = std::numeric_limits<double>::infinity();
  struct Hit {
    double value;
    std::vector<int> S;
  };
  std::vector<Hit> hits;
  std::vector<int> S(m, 0);
  auto tol = [&]() { return saturation_tol(alpha, best); };

  if (m == 3) {
    // Three settings need joint achievability across the pairs.  Group the
    // eight strategies into the four complement classes p with pair signs
    // v_p = (z01,z02,z12); the class masses M_p determine all Z_kl, and a
    // class imbalance exists for any S iff M_p + M_q >= |a_p - a_q| with
    // a = (0, (S0+S1)/2, (S0+S2)/2, (S1+S2)/2).  For fixed S the Z part is
    // linear in M, so its minimum is a vertex of the small polytope
    // {M >= 0, sum M = N, M_p + M_q >= |a_p - a_q|}, found by enumerating
    // the basic solutions (precomputed inverses; only the rhs varies).
    static constexpr int kClassSigns[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    const double c01 = -alpha[pair_index(3, 0, 1)];
    const double c02 = -alpha[pair_index(3, 0, 2)];
    const double c12 = -alpha[pair_index(3, 1, 2)];
    double w[4];
    for (int p = 0; p < 4; ++p)
      w[p] = c01 * kClassSigns[p][0] + c02 * kClassSigns[p][1] + c12 * kClassSigns[p][2];

    // constraint rows: 4 nonnegativity, then pairs (p,q) in lexicographic order
    int pr[6], qr[6], nrp = 0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) pr[nrp] = p, qr[nrp] = q, ++nrp;
    struct Basis {
      Eigen::Matrix4d inv;
      int rows[3];
    };
    std::vector<Basis> bases;
    for (int i = 0; i < 10; ++i)
      for (int j = i + 1; j < 10; ++j)
        for (int k = j + 1; k < 10; ++k) {
          Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
          const int sel[3] = {i, j, k};
          for (int r = 0; r < 3; ++r) {
            if (sel[r] < 4) A(r, sel[r]) = 1;
            else A(r, pr[sel[r] - 4]) = A(r, qr[sel[r] - 4]) = 1;
          }
          A.row(3).setOnes();
          Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
          if (lu.isInvertible()) bases.push_back({lu.inverse(), {i, j, k}});
        }

    struct Hit3 {
      double value;
      std::array<int, 3> S;
      std::vector<std::array<double, 3>> Z;  // optimal Z triples
    };
    std::vector<Hit3> hits3;
    for (int S0 = -N; S0 <= N; S0 += 2)
      for (int S1 = -N; S1 <= N; S1 += 2)
        for (int S2 = -N; S2 <= N; S2 += 2) {
          double G = alpha[0] * S0 + alpha[1] * S1 + alpha[2] * S2;
          const int Sv[3] = {S0, S1, S2};
          for (int i = 0; i < 3; ++i)
            G += 0.5 * alpha[pair_index(3, i, i)] * (double(Sv[i]) * Sv[i] - N);
          G += alpha[pair_index(3, 0, 1)] * double(S0) * S1 +
               alpha[pair_index(3, 0, 2)] * double(S0) * S2 +
               alpha[pair_index(3, 1, 2)] * double(S1) * S2;
          // cheap per-pair relaxation prunes the expensive basic-solution scan
          double relax = 0.0;
          const double cc[3] = {c01, c02, c12};
          for (int t = 0; t < 3; ++t) {
            const int i = t == 2 ? 1 : 0, j = t == 0 ? 1 : 2;
            const int zmax = N - std::abs(Sv[i] - Sv[j]);
            const int zmin = -N + std::abs(Sv[i] + Sv[j]);
            relax += std::min(cc[t] * zmax, cc[t] * zmin);
          }
          if (G + relax > best + tol()) continue;

          const double a4[4] = {0.0, 0.5 * (S0 + S1), 0.5 * (S0 + S2), 0.5 * (S1 + S2)};
          double rhs10[10] = {0, 0, 0, 0};
          for (int t = 0; t < 6; ++t) rhs10[4 + t] = std::abs(a4[pr[t]] - a4[qr[t]]);
          double lpbest = std::numeric_limits<double>::infinity();
          std::vector<std::array<double, 3>> zopt;
          for (const auto& B : bases) {
            Eigen::Vector4d rhs(rhs10[B.rows[0]], rhs10[B.rows[1]], rhs10[B.rows[2]], double(N));
            const Eigen::Vector4d M = B.inv * rhs;
            bool ok = true;
            for (int r = 0; r < 4 && ok; ++r) ok = M[r] >= -1e-9;
            for (int t = 0; t < 6 && ok; ++t) ok = M[pr[t]] + M[qr[t]] >= rhs10[4 + t] - 1e-9;
            if (!ok) continue;
            const double val = w[0] * M[0] + w[1] * M[1] + w[2] * M[2] + w[3] * M[3];
            if (val < lpbest - 1e-9) {
              lpbest = val;
              zopt.clear();
            }
            if (val <= lpbest + 1e-9) {
              std::array<double, 3> z;
              for (int t = 0; t < 3; ++t)
                z[t] = kClassSigns[0][t] * M[0] + kClassSigns[1][t] * M[1] +
                       kClassSigns[2][t] * M[2] + kClassSigns[3][t] * M[3];
              zopt.push_back(z);
            }
          }
          if (!std::isfinite(lpbest)) continue;
          const double v = G + lpbest;
          if (v < best) {
            best = v;
            std::erase_if(hits3, [&](const Hit3& h) { return h.value > best + tol(); });
          }
          if (v <= best + tol()) hits3.push_back({v, {S0, S1, S2}, zopt});
        }

    res.beta_c = res.integral ? std::round(best) : best;
    res.degenerate = std::abs(res.beta_c) <= tol();
    std::set<std::vector<int64_t>> seen;
    for (const auto& hit : hits3) {
      if (hit.value > res.beta_c + tol()) continue;
      for (const auto& z : hit.Z) {
        // only integral optima correspond to realizable configurations
        bool integral_z = true;
        std::vector<int> Zv(9, 0);
        for (int i = 0; i < 3; ++i) Zv[i * 3 + i] = N;
        const int zi[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (int t = 0; t < 3; ++t) {
          const double r = std::round(z[t]);
          if (std::abs(z[t] - r) > 1e-6) {
            integral_z = false;
            break;
          }
          Zv[zi[t][0] * 3 + zi[t][1]] = Zv[zi[t][1] * 3 + zi[t][0]] = int(r);
        }
        if (!integral_z) continue;
        const std::vector<int> Svec(hit.S.begin(), hit.S.end());
        Vec d = Vertex::design_from_SZ(Svec, Zv, sc);
        if (seen.insert(detail::design_key(d)).second) res.minimizer_designs.push_back(d);
      }
    }
    return res;
  }

  std::function<void(int)> rec = [&](int k) {
    if (k == m) {
      double v = 0.0;
      for (int i = 0; i < m; ++i) {
        v += alpha[i] * S[i];
        v += 0.5 * alpha[pair_index(m, i, i)] * (double(S[i]) * S[i] - N);
      }
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          const double a = alpha[pair_index(m, i, j)];
          const int zmax = N - std::abs(S[i] - S[j]);
          const int zmin = -N + std::abs(S[i] + S[j]);
          const int z = a > 0 ? zmax : zmin;
          v += a * (double(S[i]) * S[j] - z);
        }
      if (v < best) {
        best = v;
        std::erase_if(hits, [&](const Hit& h) { return h.value > best + tol(); });
      }
      if (v <= best + tol()) hits.push_back({v, S});
      return;
    }
    for (int s = -N; s <= N; s += 2) {
      S[k] = s;
      rec(k + 1);
    }
  };
  rec(0);

  res.beta_c = res.integral ? std::round(best) : best;
  res.degenerate = std::abs(res.beta_c) <= tol();

  // Expand minimizing S configurations into (S, Z) designs; when a_kl == 0
  // either tetrahedron extreme applies, so record both.
  std::set<std::vector<int64_t>> seen;
  for (const auto& hit : hits) {
    if (hit.value > res.beta_c + tol()) continue;
    const std::vector<int>& Sv = hit.S;
    std::vector<std::pair<int, int>> free_pairs;  // pairs with a_kl == 0
    std::vector<int> Zbase(m * m, 0);
    for (int i = 0; i < m; ++i) Zbase[i * m + i] = N;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const double a = alpha[pair_index(m, i, j)];
        const int zmax = N - std::abs(Sv[i] - Sv[j]);
        const int zmin = -N + std::abs(Sv[i] + Sv[j]);
        if (a > 0) Zbase[i * m + j] = Zbase[j * m + i] = zmax;
        else if (a < 0) Zbase[i * m + j] = Zbase[j * m + i] = zmin;
        else if (zmax == zmin) Zbase[i * m + j] = Zbase[j * m + i] = zmax;
        else free_pairs.push_back({i, j});
      }
    const int n_var = static_cast<int>(free_pairs.size());
    for (int mask = 0; mask < (1 << n_var); ++mask) {
      std::vector<int> Zv = Zbase;
      for (int t = 0; t < n_var; ++t) {
        auto [i, j] = free_pairs[t];
        const int zmax = N - std::abs(Sv[i] - Sv[j]);
        const int zmin = -N + std::abs(Sv[i] + Sv[j]);
        const int z = (mask >> t) & 1 ? zmin : zmax;
        Zv[i * m + j] = Zv[j * m + i] = z;
      }
      Vec d = Vertex::design_from_SZ(Sv, Zv, sc);
      if (seen.insert(detail::design_key(d)).second) res.minimizer_designs.push_back(d);
    }
  }
  return res;
}

// Saturating configurations of the pairwise-extreme grid relaxation: S over
// the grid, each Z_kl independently at the tetrahedron extreme minimizing its
// term (both extremes when a_kl = 0), joint achievability ignored.  These are
// the configurations the reference tables certify ranks against; they can
// include points that no deterministic strategy realizes.
inline std::vector<Vec> pairwise_extreme_saturators(const Vec& alpha, const Scenario& sc) {
  sc.validate();
  if (alpha.size() != sc.design_dim())
    throw std::invalid_argument("pairwise_extreme_saturators: dimension mismatch");
  const int m = sc.n_settings;
  const int N = sc.n_parties;
  double best = std::numeric_limits<double>::infinity();
  auto tolf = [&]() { return saturation_tol(alpha, best); };
  std::vector<std::vector<int>> hitS;
  std::vector<double> hitV;
  std::vector<int> S(m, 0);
  std::function<void(int)> rec = [&](int k) {
    if (k == m) {
      double v = 0.0;
      for (int i = 0; i < m; ++i) {
        v += alpha[i] * S[i];
        v += 0.5 * alpha[pair_index(m, i, i)] * (double(S[i]) * S[i] - N);
      }
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          const double a = alpha[pair_index(m, i, j)];
          const int zmax = N - std::abs(S[i] - S[j]);
          const int zmin = -N + std::abs(S[i] + S[j]);
          v += std::min(a * (double(S[i]) * S[j] - zmax), a * (double(S[i]) * S[j] - zmin));
        }
      if (v < best) best = v;
      if (v <= best + tolf()) {
        hitS.push_back(S);
        hitV.push_back(v);
      }
      return;
    }
    for (int s = -N; s <= N; s += 2) {
      S[k] = s;
      rec(k + 1);
    }
  };
  rec(0);
  const double tol = tolf();

  std::vector<Vec> rows;
  std::set<std::vector<int64_t>> seen;
  for (size_t h = 0; h < hitS.size(); ++h) {
    if (hitV[h] > best + tol) continue;
    const std::vector<int>& Sv = hitS[h];
    // expand every per-pair extreme that attains the pair minimum
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) pairs.push_back({i, j});
    std::vector<std::vector<int>> zcands(pairs.size());
    for (size_t t = 0; t < pairs.size(); ++t) {
      auto [i, j] = pairs[t];
      const double a = alpha[pair_index(m, i, j)];
      const int zmax = N - std::abs(Sv[i] - Sv[j]);
      const int zmin = -N + std::abs(Sv[i] + Sv[j]);
      const double vmax = a * (double(Sv[i]) * Sv[j] - zmax);
      const double vmin = a * (double(Sv[i]) * Sv[j] - zmin);
      if (vmax <= vmin - tol) zcands[t] = {zmax};
      else if (vmin <= vmax - tol) zcands[t] = {zmin};
      else if (zmax == zmin) zcands[t] = {zmax};
      else zcands[t] = {zmin, zmax};
    }
    std::vector<size_t> idx(pairs.size(), 0);
    while (true) {
      std::vector<int> Zv(m * m, 0);
      for (int i = 0; i < m; ++i) Zv[i * m + i] = N;
      for (size_t t = 0; t < pairs.size(); ++t) {
        auto [i, j] = pairs[t];
        Zv[i * m + j] = Zv[j * m + i] = zcands[t][idx[t]];
      }
      Vec d = Vertex::design_from_SZ(Sv, Zv, sc);
      if (seen.insert(detail::design_key(d)).second) rows.push_back(d);
      size_t t = 0;
      while (t < pairs.size() && ++idx[t] == zcands[t].size()) idx[t++] = 0;
      if (t == pairs.size()) break;
    }
  }
  return rows;
}

// All vertex design vectors v with |alpha . v - beta_c| <= tol, deduplicated.
inline std::vector<Vec> saturating_vertices(const Vec& alpha, const Scenario& sc,
                                            double beta_c, double tol,
                                            double budget = kDefaultEnumBudget) {
  std::vector<Vec> rows;
  std::set<std::vector<int64_t>> seen;
  auto limit = [&]() { return beta_c + tol; };
  detail::pruned_scan(alpha, sc, budget, limit,
                      [&](double v, const std::vector<int>& counts, const std::vector<int>&,
                          const std::vector<int>&) {
                        if (std::abs(v - beta_c) > tol) return;
                        Vertex vert = Vertex::from_counts(counts, sc);
                        if (seen.insert(detail::design_key(vert.design)).second)
                          rows.push_back(vert.design);
                      });
  if (rows.empty())
    throw std::runtime_error("saturating_vertices: no vertex attains the given bound");
  return rows;
}

}  // namespace belltight
