#pragma once

// Bell operator in the (N+1)-dimensional collective-spin subspace, ground
// states, analytic gradients, and multistart optimization of the measurement
// angles.
//
// Measurement ansatz: every party measures in the real x-z plane of the
// Bloch sphere, A_k = cos(theta_k) sigma_z + sin(theta_k) sigma_x, so the
// symmetric one-body sums become S_k = 2 cos(theta_k) Sz + 2 sin(theta_k) Sx
// and Z_kl = N cos(theta_k - theta_l) times the identity.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "scenario.hpp"

namespace belltight {

struct CollectiveSpin {
  int n_parties = 0;
  Mat sx, sz;            // real (N+1) x (N+1), Sz eigenbasis m = N/2 .. -N/2
  Eigen::MatrixXcd sy;
};

inline CollectiveSpin collective_spin(int N) {
  if (N < 1) throw std::invalid_argument("collective_spin: N must be >= 1");
  const int dim = N + 1;
  CollectiveSpin cs;
  cs.n_parties = N;
  cs.sz = Mat::Zero(dim, dim);
  cs.sx = Mat::Zero(dim, dim);
  cs.sy = Eigen::MatrixXcd::Zero(dim, dim);
  const double j = 0.5 * N;
  auto mval = [&](int i) { return j - i; };
  for (int i = 0; i < dim; ++i) cs.sz(i, i) = mval(i);
  const std::complex<double> im(0.0, 1.0);
  for (int col = 0; col < dim; ++col) {
    const double mp = mval(col);
    if (col > 0) {  // row index col-1 holds m = m' + 1 (raising element)
      const double c = 0.5 * std::sqrt((j - mp) * (j + mp + 1));
      cs.sx(col - 1, col) = c;
      cs.sy(col - 1, col) = -im * c;
    }
    if (col < dim - 1) {  // row index col+1 holds m = m' - 1 (lowering element)
      const double c = 0.5 * std::sqrt((j + mp) * (j - mp + 1));
      cs.sx(col + 1, col) = c;
      cs.sy(col + 1, col) = im * c;
    }
  }
  return cs;
}

struct MeasurementAngles {
  Vec theta;  // length m, radians

  // Representative with every angle reduced mod 2*pi into [0, 2*pi).
  Vec canonical() const {
    Vec t = theta;
    const double tau = 2.0 * M_PI;
    for (int i = 0; i < t.size(); ++i) {
      t[i] = std::fmod(t[i], tau);
      if (t[i] < 0) t[i] += tau;
    }
    return t;
  }
};

// S_k operator for a single angle.
inline Mat setting_operator(const CollectiveSpin& cs, double theta) {
  return 2.0 * std::cos(theta) * cs.sz + 2.0 * std::sin(theta) * cs.sx;
}

inline Mat setting_operator_dtheta(const CollectiveSpin& cs, double theta) {
  return -2.0 * std::sin(theta) * cs.sz + 2.0 * std::cos(theta) * cs.sx;
}

inline Mat bell_operator(const Vec& alpha, const Vec& theta, const Scenario& sc,
                         const CollectiveSpin& cs) {
  const int m = sc.n_settings;
  const int N = sc.n_parties;
  if (alpha.size() != sc.design_dim() || theta.size() != m)
    throw std::invalid_argument("bell_operator: dimension mismatch");
  const int dim = N + 1;
  std::vector<Mat> A(m);
  for (int k = 0; k < m; ++k) A[k] = setting_operator(cs, theta[k]);
  Mat H = Mat::Zero(dim, dim);
  for (int k = 0; k < m; ++k) {
    H += alpha[k] * A[k];
    H += 0.5 * alpha[pair_index(m, k, k)] * (A[k] * A[k] - double(N) * Mat::Identity(dim, dim));
  }
  for (int k = 0; k < m; ++k)
    for (int l = k + 1; l < m; ++l) {
      const double a = alpha[pair_index(m, k, l)];
      if (a == 0) continue;
      H += a * (0.5 * (A[k] * A[l] + A[l] * A[k]) -
                N * std::cos(theta[k] - theta[l]) * Mat::Identity(dim, dim));
    }
  H = 0.5 * (H + H.transpose()).eval();  // exactly symmetric
  return H;
}

inline Mat bell_operator(const Vec& alpha, const Vec& theta, const Scenario& sc) {
  return bell_operator(alpha, theta, sc, collective_spin(sc.n_parties));
}

// Smallest eigenpair of a real symmetric matrix.  Sign convention: the
// largest-magnitude component of the eigenvector is positive.
inline std::pair<double, Vec> ground_state(const Mat& H) {
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + H.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("ground_state: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  double lam = es.eigenvalues()[0];
  Vec psi = es.eigenvectors().col(0);
  int imax = 0;
  psi.cwiseAbs().maxCoeff(&imax);
  if (psi[imax] < 0) psi = -psi;
  return {lam, psi};
}

inline double ground_energy(const Mat& H) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

inline void check_eigen_residual(const Mat& H, const Vec& psi, const char* who) {
  const double lam = psi.dot(H * psi);
  const double res = (H * psi - lam * psi).cwiseAbs().maxCoeff();
  if (res > 1e-8 * (1.0 + std::abs(lam)))
    throw std::invalid_argument(std::string(who) + ": psi is not an eigenstate (residual " +
                                std::to_string(res) + ")");
}

// d(lambda_min)/d(theta_k) = <psi| dH/dtheta_k |psi>  (Hellmann-Feynman).
inline Vec grad_theta(const Vec& alpha, const Vec& theta, const Vec& psi, const Scenario& sc,
                      const CollectiveSpin& cs) {
  const int m = sc.n_settings;
  const int N = sc.n_parties;
  check_eigen_residual(bell_operator(alpha, theta, sc, cs), psi, "grad_theta");
  std::vector<Vec> Apsi(m);
  for (int k = 0; k < m; ++k) Apsi[k] = setting_operator(cs, theta[k]) * psi;
  Vec g(m);
  for (int k = 0; k < m; ++k) {
    const Vec dApsi = setting_operator_dtheta(cs, theta[k]) * psi;
    double gk = alpha[k] * psi.dot(dApsi);
    gk += alpha[pair_index(m, k, k)] * Apsi[k].dot(dApsi);  // psi^T {A,dA}/2 psi
    for (int l = 0; l < m; ++l) {
      if (l == k) continue;
      const double a = alpha[pair_index(m, k, l)];
      if (a == 0) continue;
      gk += a * (Apsi[l].dot(dApsi) + N * std::sin(theta[k] - theta[l]));
    }
    g[k] = gk;
  }
  return g;
}

inline Vec grad_theta(const Vec& alpha, const Vec& theta, const Vec& psi, const Scenario& sc) {
  return grad_theta(alpha, theta, psi, sc, collective_spin(sc.n_parties));
}

// d(beta_Q)/d(alpha_mu) = quantum expectations of the design operators; this
// is the quantum point in design coordinates.
inline Vec grad_alpha(const Vec& alpha, const Vec& theta_star, const Vec& psi_star,
                      const Scenario& sc, const CollectiveSpin& cs) {
  const int m = sc.n_settings;
  const int N = sc.n_parties;
  check_eigen_residual(bell_operator(alpha, theta_star, sc, cs), psi_star, "grad_alpha");
  std::vector<Vec> Apsi(m);
  for (int k = 0; k < m; ++k) Apsi[k] = setting_operator(cs, theta_star[k]) * psi_star;
  Vec g(sc.design_dim());
  for (int k = 0; k < m; ++k) {
    g[k] = psi_star.dot(Apsi[k]);
    g[pair_index(m, k, k)] = 0.5 * (Apsi[k].squaredNorm() - N);
    for (int l = k + 1; l < m; ++l)
      g[pair_index(m, k, l)] = Apsi[k].dot(Apsi[l]) - N * std::cos(theta_star[k] - theta_star[l]);
  }
  return g;
}

inline Vec grad_alpha(const Vec& alpha, const Vec& theta_star, const Vec& psi_star,
                      const Scenario& sc) {
  return grad_alpha(alpha, theta_star, psi_star, sc, collective_spin(sc.n_parties));
}

struct QuantumOptions {
  int n_starts = 32;       // random starts on top of the deterministic grid
  uint64_t seed = 0;
  double grad_tol = 1e-10;
  int max_iters = 1000;
  int grid_per_angle = 5;  // deterministic grid resolution on [0, pi)
  std::vector<Vec> extra_starts;  // e.g. warm starts from a previous solve
};

struct QuantumSolution {
  MeasurementAngles theta_star;
  double beta_q = 0.0;
  Vec ground_state;
  double spectral_gap = 0.0;
  int n_starts_used = 0;
  bool degenerate = false;  // gap below 1e-10: gradient branch is a choice
  double grad_norm = 0.0;
};

namespace detail {

// Gradient descent with backtracking (Armijo) line search on
// f(theta) = lambda_min(H(theta)).
inline void refine_start(const Vec& alpha, const Scenario& sc, const CollectiveSpin& cs,
                         Vec theta, const QuantumOptions& opts, QuantumSolution& best,
                         bool& have_best) {
  auto eval = [&](const Vec& t) { return ground_state(bell_operator(alpha, t, sc, cs)); };
  auto [f, psi] = eval(theta);
  double step = 0.1;
  double gnorm = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    Vec g = grad_theta(alpha, theta, psi, sc, cs);
    gnorm = g.norm();
    if (gnorm <= opts.grad_tol) break;
    bool accepted = false;
    double t = step;
    for (int h = 0; h < 60; ++h) {
      Vec cand = theta - t * g;
      auto [fc, pc] = eval(cand);
      if (fc <= f - 1e-4 * t * gnorm * gnorm) {
        theta = cand;
        f = fc;
        psi = pc;
        step = 2.0 * t;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  MeasurementAngles ang{theta};
  const Vec canon = ang.canonical();
  bool better = false;
  if (!have_best || f < best.beta_q - 1e-12 * (1.0 + std::abs(f))) {
    better = true;
  } else if (std::abs(f - best.beta_q) <= 1e-12 * (1.0 + std::abs(f))) {
    // deterministic tie-break: lexicographically smallest canonical angles
    const Vec bc = best.theta_star.canonical();
    better = std::lexicographical_compare(canon.data(), canon.data() + canon.size(),
                                          bc.data(), bc.data() + bc.size());
  }
  if (better) {
    Eigen::SelfAdjointEigenSolver<Mat> es(bell_operator(alpha, theta, sc, cs));
    best.theta_star = ang;
    best.beta_q = es.eigenvalues()[0];
    Vec p = es.eigenvectors().col(0);
    int imax = 0;
    p.cwiseAbs().maxCoeff(&imax);
    if (p[imax] < 0) p = -p;
    best.ground_state = p;
    best.spectral_gap = es.eigenvalues().size() > 1
                            ? es.eigenvalues()[1] - es.eigenvalues()[0]
                            : 0.0;
    best.degenerate = best.spectral_gap < 1e-10;
    best.grad_norm = gnorm;
    have_best = true;
  }
}

}  // namespace detail

inline QuantumSolution quantum_value(const Vec& alpha, const Scenario& sc,
                                     const QuantumOptions& opts = {}) {
  sc.validate();
  if (alpha.size() != sc.design_dim())
    throw std::invalid_argument("quantum_value: dimension mismatch");
  if (alpha.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("quantum_value: degenerate all-zero coefficients");
  const int m = sc.n_settings;
  const CollectiveSpin cs = collective_spin(sc.n_parties);

  QuantumSolution best;
  bool have_best = false;
  int used = 0;

  // Deterministic grid: theta_0 = 0 (global angle shifts leave the spectrum
  // unchanged), remaining angles on a uniform grid over [0, pi).
  const int G = opts.grid_per_angle;
  std::vector<int> idx(m - 1, 0);
  bool done = false;
  while (!done) {
    Vec t = Vec::Zero(m);
    for (int k = 1; k < m; ++k) t[k] = idx[k - 1] * M_PI / G;
    detail::refine_start(alpha, sc, cs, t, opts, best, have_best);
    ++used;
    int p = 0;
    while (p < m - 1 && ++idx[p] == G) idx[p++] = 0;
    if (p == m - 1) done = true;
    if (m == 1) done = true;
  }

  for (const Vec& t : opts.extra_starts) {
    detail::refine_start(alpha, sc, cs, t, opts, best, have_best);
    ++used;
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
  for (int r = 0; r < opts.n_starts; ++r) {
    Vec t(m);
    for (int k = 0; k < m; ++k) t[k] = uni(rng);
    detail::refine_start(alpha, sc, cs, t, opts, best, have_best);
    ++used;
  }
  best.n_starts_used = used;
  return best;
}

}  // namespace belltight
