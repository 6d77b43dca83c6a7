// Acceptance gate: one pass/fail line per criterion.  Exit code 0 iff every
// non-skipped criterion passes.  The long-running large-N case only executes
// when BELLTIGHT_STRETCH is set; otherwise it reports SKIP without failing.

#include <belltight/geometry.hpp>
#include <belltight/tables.hpp>
#include <belltight/tighten.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <random>
#include <thread>

using namespace belltight;

namespace {

int n_fail = 0;

void report(int idx, const char* what, bool ok, double seconds, const std::string& note = "") {
  std::printf("criterion %2d: %s  %-55s (%.1fs)%s%s\n", idx, ok ? "PASS" : "FAIL", what, seconds,
              note.empty() ? "" : "  ", note.c_str());
  std::fflush(stdout);
  if (!ok) ++n_fail;
}

void run(int idx, const char* what, const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string note;
  bool ok = false;
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    note = std::string("exception: ") + e.what();
  }
  report(idx, what, ok, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
         note);
}

Vec make_alpha(std::initializer_list<double> v) {
  Vec a(v.size());
  int i = 0;
  for (double x : v) a[i++] = x;
  return a;
}

int hw_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n ? static_cast<int>(n) : 4;
}

bool check_tables(const std::vector<std::string>& ids, std::string& note) {
  ReproduceOptions opts;
  opts.certify = false;
  opts.threads = hw_threads();
  bool ok = true;
  for (const auto& id : ids) {
    RunReport rep = reproduce(id, opts);
    for (const auto& r : rep.rows) {
      if (!r.pass) {
        ok = false;
        note += r.expected.provenance + " ";
        if (!r.beta_c_ok) note += "beta_c=" + std::to_string(r.beta_c) + " ";
        if (!r.beta_q_ok) note += "beta_q=" + std::to_string(r.beta_q) + " ";
        if (!r.delta_ok) note += "delta=" + std::to_string(r.delta) + " ";
        if (r.skipped) note += "skipped ";
      }
    }
  }
  return ok;
}

// Minimum of l00*s00 + l01*s01 + l11*s11 over the symmetric two-qubit quantum
// set, built independently of the collective-spin code: shared measurement
// angles, Pauli tensor products projected onto the triplet sector, grid
// search over the two angles plus coordinate descent with a shrinking step.
double min_sym_quantum_functional(double l00, double l01, double l11) {
  using M2 = Eigen::Matrix2d;
  M2 sz, sx;
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  // triplet basis |00>, (|01>+|10>)/sqrt(2), |11> inside |ab>
  Eigen::Matrix<double, 4, 3> P = Eigen::Matrix<double, 4, 3>::Zero();
  const double r = 1.0 / std::sqrt(2.0);
  P(0, 0) = 1;
  P(1, 1) = r;
  P(2, 1) = r;
  P(3, 2) = 1;
  auto kron = [](const M2& a, const M2& b) {
    Eigen::Matrix4d k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
  };
  auto f = [&](double t0, double t1) {
    const M2 a0 = std::cos(t0) * sz + std::sin(t0) * sx;
    const M2 a1 = std::cos(t1) * sz + std::sin(t1) * sx;
    const Eigen::Matrix4d H = l00 * kron(a0, a0) +
                              0.5 * l01 * (kron(a0, a1) + kron(a1, a0)) + l11 * kron(a1, a1);
    const Eigen::Matrix3d Hs = P.transpose() * H * P;
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(Hs).eigenvalues()[0];
  };
  double best = std::numeric_limits<double>::infinity();
  double bx = 0, by = 0;
  const int G = 72;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      const double x = 2 * M_PI * i / G, y = 2 * M_PI * j / G;
      const double v = f(x, y);
      if (v < best) best = v, bx = x, by = y;
    }
  double step = 2 * M_PI / G;
  for (int it = 0; it < 300; ++it) {
    bool improved = false;
    double* coords[2] = {&bx, &by};
    for (double* c : coords)
      for (double d : {-step, step}) {
        *c += d;
        const double v = f(bx, by);
        if (v < best) {
          best = v;
          improved = true;
        } else {
          *c -= d;
        }
      }
    if (!improved) step *= 0.5;
    if (step < 1e-12) break;
  }
  return best;
}

}  // namespace

int main() {
  const double rt2 = std::sqrt(2.0);

  run(1, "two-setting two-party exactness", [&](std::string& note) {
    Scenario sc(2, 2);
    const Vec a = make_alpha({0, 0, 1, 1, -1});
    const double bc = classical_bound_exact(a, sc).beta_c;
    const double bq = quantum_value(a, sc).beta_q;
    const double delta = bq / bc;
    if (bc != -2.0) note = "beta_c=" + std::to_string(bc);
    return bc == -2.0 && std::abs(bq + 2 * rt2) <= 1e-9 && std::abs(delta - rt2) <= 1e-9;
  });

  run(2, "first reference table (m=2, 12 rows)",
      [&](std::string& note) { return check_tables({"main-1"}, note); });

  run(3, "second reference table (m=3, 12 rows)",
      [&](std::string& note) { return check_tables({"main-2"}, note); });

  run(4, "supplemental tables (65 rows)",
      [&](std::string& note) { return check_tables({"s1", "s2", "s3", "s4", "s5", "s6"}, note); });

  run(5, "facet certification of every table row", [&](std::string& note) {
    std::vector<ExpectedRow> rows;
    for (const auto& id : table_ids())
      for (auto& r : expected_rows(id)) rows.push_back(std::move(r));
    std::atomic<size_t> next{0};
    std::vector<std::string> fails(rows.size()), grid_only(rows.size());
    auto worker = [&] {
      for (size_t i; (i = next++) < rows.size();) {
        FacetCertificate c = certify_facet(rows[i].alpha_vec(), rows[i].scenario);
        const bool grid_facet = c.grid_rank == c.design_dim - 1;
        if (!c.exhaustive || (!c.is_facet && !grid_facet))
          fails[i] = rows[i].provenance + "(rank=" + std::to_string(c.affine_rank) + ") ";
        else if (!c.is_facet)
          grid_only[i] = rows[i].provenance + "(vertex rank " + std::to_string(c.affine_rank) +
                         ", grid rank " + std::to_string(c.grid_rank) + ") ";
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < hw_threads(); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    bool ok = true;
    for (const auto& f : fails)
      if (!f.empty()) ok = false, note += f;
    std::string g;
    for (const auto& s : grid_only) g += s;
    if (!g.empty())
      note += "full rank only over grid-extreme configurations (reference-table certification) for: " + g;
    return ok;
  });

  run(6, "grid relaxation equals exact enumeration", [&](std::string& note) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    for (int m : {2, 3})
      for (int N = 2; N <= 8; ++N) {
        Scenario sc(N, m);
        for (int rep = 0; rep < 200; ++rep) {
          Vec a(sc.design_dim());
          for (int i = 0; i < a.size(); ++i) a[i] = g(rng);
          const double ex = classical_bound_exact(a, sc).beta_c;
          const double te = classical_bound_tetra(a, sc).beta_c;
          const double tol = 1e-8 * std::max(1.0, std::abs(ex));
          if (te > ex + tol) {
            note = "relaxation above exact bound";
            return false;
          }
          if (std::abs(te - ex) > tol) {
            note = "mismatch at N=" + std::to_string(N) + " m=" + std::to_string(m);
            return false;
          }
        }
      }
    for (const auto& id : table_ids())
      for (const auto& r : expected_rows(id)) {
        if (r.scenario.n_parties > 10) continue;
        const Vec a = r.alpha_vec();
        const double ex = classical_bound_exact(a, r.scenario).beta_c;
        const double te = classical_bound_tetra(a, r.scenario).beta_c;
        if (ex != te || llround(ex) != r.beta_c) {
          note = "table row " + r.provenance;
          return false;
        }
      }
    return true;
  });

  run(7, "analytic gradients vs finite differences", [&](std::string& note) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0, 2 * M_PI);
    const double h = 1e-5;
    for (int m : {2, 3})
      for (int N : {3, 6, 10}) {
        Scenario sc(N, m);
        CollectiveSpin cs = collective_spin(N);
        int done = 0;
        while (done < 20) {
          Vec a(sc.design_dim()), t(m);
          for (int i = 0; i < a.size(); ++i) a[i] = g(rng);
          for (int i = 0; i < m; ++i) t[i] = u(rng);
          Eigen::SelfAdjointEigenSolver<Mat> es(bell_operator(a, t, sc, cs));
          if (es.eigenvalues()[1] - es.eigenvalues()[0] < 1e-3) continue;  // degenerate: redraw
          const Vec psi = [&] {
            Vec p = es.eigenvectors().col(0);
            return p;
          }();
          const Vec gt = grad_theta(a, t, psi, sc, cs);
          for (int k = 0; k < m; ++k) {
            Vec tp = t, tm = t;
            tp[k] += h;
            tm[k] -= h;
            const double fd = (ground_energy(bell_operator(a, tp, sc, cs)) -
                               ground_energy(bell_operator(a, tm, sc, cs))) /
                              (2 * h);
            if (std::abs(gt[k] - fd) > 1e-4 * std::max(1.0, std::abs(fd))) {
              note = "grad_theta N=" + std::to_string(N) + " m=" + std::to_string(m);
              return false;
            }
          }
          const Vec ga = grad_alpha(a, t, psi, sc, cs);
          for (int i = 0; i < a.size(); ++i) {
            Vec ap = a, am = a;
            ap[i] += h;
            am[i] -= h;
            const double fd = (ground_energy(bell_operator(ap, t, sc, cs)) -
                               ground_energy(bell_operator(am, t, sc, cs))) /
                              (2 * h);
            if (std::abs(ga[i] - fd) > 1e-4 * std::max(1.0, std::abs(fd))) {
              note = "grad_alpha N=" + std::to_string(N) + " m=" + std::to_string(m);
              return false;
            }
          }
          ++done;
        }
      }
    return true;
  });

  run(8, "global angle shift leaves the spectrum invariant", [&](std::string&) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0, 2 * M_PI);
    for (int rep = 0; rep < 50; ++rep) {
      const int m = 2 + rep % 2;
      Scenario sc(3 + rep % 6, m);
      Vec a(sc.design_dim()), t(m);
      for (int i = 0; i < a.size(); ++i) a[i] = g(rng);
      for (int i = 0; i < m; ++i) t[i] = u(rng);
      const double delta = u(rng);
      Eigen::SelfAdjointEigenSolver<Mat> s1(bell_operator(a, t, sc));
      Eigen::SelfAdjointEigenSolver<Mat> s2(bell_operator(a, t.array() + delta, sc));
      if ((s1.eigenvalues() - s2.eigenvalues()).cwiseAbs().maxCoeff() > 1e-9) return false;
    }
    return true;
  });

  run(9, "tightening convergence", [&](std::string& note) {
    Scenario sc2(2, 2);
    const Vec start = make_alpha({0, 0, 0, 0.3, -0.5});
    for (uint64_t seed = 0; seed < 20; ++seed) {
      TightenOptions opts;
      opts.seed = seed;
      TightenResult res = tighten(start, sc2, opts);
      if (res.status != TightenStatus::facet || std::abs(res.delta_final - rt2) > 1e-6) {
        note = "two-party run seed " + std::to_string(seed) + " delta " +
               std::to_string(res.delta_final);
        return false;
      }
    }
    Scenario sc3(3, 2);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    bool found = false;
    int runs = 0;
    while (runs < 20) {
      Vec a0(5);
      for (int i = 0; i < 5; ++i) a0[i] = g(rng);
      if (classical_bound_tetra(a0, sc3).beta_c >= -1e-6) continue;
      TightenOptions opts;
      opts.seed = runs;
      TightenResult res = tighten(a0, sc3, opts);
      if (!res.certificate.is_facet) {
        note = "three-party run " + std::to_string(runs) + " not a facet";
        return false;
      }
      if (std::abs(res.delta_final - 1.11303) <= 1e-4) found = true;
      ++runs;
    }
    if (!found) note = "nontrivial three-party facet never reached";
    return found;
  });

  run(10, "two-parameter families certify as facets", [&](std::string& note) {
    ReproduceOptions opts;
    for (int N : {6, 8, 10}) {
      auto mem = family("m2", N, opts);
      double best = -1;
      std::set<int> argmax;
      for (const auto& f : mem) {
        if (!f.certificate.is_facet) {
          note = "m2 N=" + std::to_string(N) + " n=" + std::to_string(f.n);
          return false;
        }
        if (f.delta > best + 1e-6) {
          best = f.delta;
          argmax = {f.n};
        } else if (f.delta > best - 1e-6) {
          argmax.insert(f.n);
        }
      }
      if (argmax != std::set<int>{-1, 1}) {
        note = "m2 N=" + std::to_string(N) + " argmax not n=+-1";
        return false;
      }
    }
    for (const auto& f : family("m3", 11, opts))
      if (!f.certificate.is_facet) {
        note = "m3 N=11 n=" + std::to_string(f.n);
        return false;
      }
    return true;
  });

  run(11, "perturbed ratios stay below the optimum", [&](std::string& note) {
    Scenario sc(2, 2);
    const Vec chsh = make_alpha({0, 0, 1, 1, -1});
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 100; ++rep) {
      Vec eta(5);
      for (int i = 0; i < 5; ++i) eta[i] = g(rng);
      eta.normalize();
      Vec a = chsh + 1e-3 * eta;
      const double bc = classical_bound_exact(a, sc).beta_c;
      if (bc >= 0) continue;
      a *= -2.0 / bc;  // rescale to the reference bound
      const double delta = quantum_value(a, sc).beta_q / -2.0;
      if (delta > rt2 + 1e-7) {
        note = "direction " + std::to_string(rep) + " delta " + std::to_string(delta);
        return false;
      }
    }
    return true;
  });

  run(12, "geometry of the two-party correlator sets", [&](std::string& note) {
    std::mt19937_64 rng(12);
    std::exponential_distribution<double> ex(1.0);
    for (int rep = 0; rep < 10000; ++rep) {
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
      SymCorr222 s{c.c00, 0.5 * (c.c01 + c.c10), c.c11};
      if (!quantum222_membership(c) || !sym222_quantum_membership(s)) {
        note = "local sample escaped the quantum set";
        return false;
      }
    }
    // boundary points of the dual quantum set support the set at exactly -1:
    // the radius along each direction comes from the collective-spin solver
    // (r = -1/beta_Q), and the support is recomputed by an independent
    // two-qubit Pauli construction
    std::normal_distribution<double> g;
    Scenario sc2(2, 2);
    for (int rep = 0; rep < 40; ++rep) {
      Vec dir(3);
      for (int i = 0; i < 3; ++i) dir[i] = g(rng);
      dir.normalize();
      Vec a(5);
      a << 0, 0, dir[0], 0.5 * dir[1], dir[2];  // lambda.s in design coordinates
      QuantumOptions qo;
      qo.n_starts = 16;
      const double bq = quantum_value(a, sc2, qo).beta_q;
      if (bq >= -1e-9) continue;  // no dual boundary along this ray
      const double radius = -1.0 / bq;
      const double mv =
          min_sym_quantum_functional(radius * dir[0], radius * dir[1], radius * dir[2]);
      if (std::abs(mv + 1.0) > 1e-6) {
        note = "dual boundary support value " + std::to_string(mv);
        return false;
      }
    }
    // family cross-section plane: quantum dual inside local dual, family
    // facets on the local boundary
    Scenario sc(12, 2);
    const Vec a1 = make_alpha({1, -1, 1, 1, 1}) / 24.0;
    const Vec a2 = make_alpha({1, 1, 0, 0, 0}) / 24.0;
    QuantumOptions qopts;
    qopts.n_starts = 8;
    SectionCurve curve = cross_section(a1, a2, sc, 360, qopts);
    for (const auto& smp : curve.samples)
      if (!smp.dual_c_unbounded && smp.r_dual_q > smp.r_dual_c + 1e-9) {
        note = "quantum dual radius above local at phi " + std::to_string(smp.phi);
        return false;
      }
    for (int n = -17; n <= 17; n += 2) {
      const Vec fam = a1 + double(n) * a2;
      const double bc_fam = classical_bound_tetra(fam, sc).beta_c;
      const double phi = std::atan2(double(n), 1.0);
      const Vec u = std::cos(phi) * a1 + std::sin(phi) * a2;
      const double r_section = -1.0 / classical_bound_tetra(u, sc).beta_c;
      const double r_facet = std::sqrt(1.0 + double(n) * n) / -bc_fam;
      if (std::abs(r_section - r_facet) > 1e-9 * r_facet) {
        note = "family member n=" + std::to_string(n) + " off the dual boundary";
        return false;
      }
    }
    return true;
  });

  {
    const char* env = std::getenv("BELLTIGHT_STRETCH");
    if (env && *env && std::string(env) != "0") {
      run(13, "large-N three-setting ratio", [&](std::string& note) {
        Scenario sc(141, 3);
        const Vec a = make_alpha({694, 0, -694, 385, 309, 385, 248, 309, 385});
        RatioResult r = ratio(a, sc);
        note = "delta " + std::to_string(r.delta);
        return std::abs(r.delta - 1.21485) <= 1e-4;
      });
    } else {
      std::printf("criterion 13: SKIP  large-N three-setting ratio (set BELLTIGHT_STRETCH=1 to run)\n");
    }
  }

  std::printf("%s (%d failure%s)\n", n_fail == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", n_fail,
              n_fail == 1 ? "" : "s");
  return n_fail == 0 ? 0 : 1;
}
