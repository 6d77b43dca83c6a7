#pragma once

// Scenario and coefficient types for permutation-invariant two-body Bell
// functionals in the (N,m,2) setting, plus the canonical flattening that
// links coefficient vectors to local-polytope points.
//
// Flattening convention (length M = m(m+3)/2):
//   [a_0 .. a_{m-1};  a_00, a_01, .., a_{0,m-1}, a_11, .., a_{m-1,m-1}]
// i.e. one-body block followed by the upper triangle of the two-body block
// in row-major order.
//
// The design vector of a deterministic strategy profile with symmetric sums
// S_k and Z_kl is
//   d_k      = S_k
//   d_{kl}   = S_k S_l - Z_kl          (k < l)
//   d_{kk}   = (S_k^2 - N) / 2
// so that the functional value is the plain dot product flatten(a) . d.
// Every entry is an integer for every vertex: S_k has the parity of N, hence
// S_k^2 - N is even.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace belltight {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Scenario {
  int n_parties = 0;   // N
  int n_settings = 0;  // m

  Scenario() = default;
  Scenario(int N, int m) : n_parties(N), n_settings(m) { validate(); }

  void validate() const {
    if (n_parties < 1) throw std::invalid_argument("Scenario: n_parties must be >= 1");
    if (n_settings < 2) throw std::invalid_argument("Scenario: n_settings must be >= 2");
  }

  // Dimension of the correlator space: m one-body + m(m+1)/2 two-body slots.
  int design_dim() const { return n_settings * (n_settings + 3) / 2; }
  // Number of single-party deterministic strategies.
  int n_strategies() const { return 1 << n_settings; }
};

// Index of the (k,l) two-body slot, k <= l, within the flattened vector.
inline int pair_index(int m, int k, int l) {
  if (k > l) std::swap(k, l);
  return m + k * m - k * (k - 1) / 2 + (l - k);
}

struct BellCoefficients {
  Vec one_body;   // length m
  Mat two_body;   // m x m, symmetric

  static constexpr double kSymTol = 1e-12;

  BellCoefficients() = default;
  BellCoefficients(Vec ob, Mat tb) : one_body(std::move(ob)), two_body(std::move(tb)) {
    check_symmetric();
  }

  int n_settings() const { return static_cast<int>(one_body.size()); }

  void check_symmetric() const {
    if (two_body.rows() != two_body.cols() || two_body.rows() != one_body.size())
      throw std::invalid_argument("BellCoefficients: inconsistent dimensions");
    for (int k = 0; k < two_body.rows(); ++k)
      for (int l = k + 1; l < two_body.cols(); ++l)
        if (std::abs(two_body(k, l) - two_body(l, k)) > kSymTol)
          throw std::invalid_argument("BellCoefficients: two_body not symmetric");
  }
};

inline Vec flatten(const BellCoefficients& c) {
  const int m = c.n_settings();
  Vec a(m * (m + 3) / 2);
  for (int k = 0; k < m; ++k) a[k] = c.one_body[k];
  for (int k = 0; k < m; ++k)
    for (int l = k; l < m; ++l) a[pair_index(m, k, l)] = 0.5 * (c.two_body(k, l) + c.two_body(l, k));
  return a;
}

inline BellCoefficients unflatten(const Vec& a, int m) {
  if (a.size() != m * (m + 3) / 2)
    throw std::invalid_argument("unflatten: wrong length");
  BellCoefficients c;
  c.one_body = a.head(m);
  c.two_body = Mat(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = k; l < m; ++l) c.two_body(k, l) = c.two_body(l, k) = a[pair_index(m, k, l)];
  return c;
}

inline bool is_integral(const Vec& a, double tol = 1e-12) {
  for (int i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - std::round(a[i])) > tol) return false;
  return true;
}

// Dot product of flattened coefficients with a design vector.  Exact for
// integer inputs: every term stays far below 2^53.
inline double functional_value(const Vec& alpha, const Vec& d) {
  if (alpha.size() != d.size())
    throw std::invalid_argument("functional_value: dimension mismatch");
  return alpha.dot(d);
}

inline int64_t functional_value_int(const std::vector<int64_t>& alpha,
                                    const std::vector<int64_t>& d) {
  if (alpha.size() != d.size())
    throw std::invalid_argument("functional_value_int: dimension mismatch");
  int64_t v = 0;
  for (size_t i = 0; i < alpha.size(); ++i) v += alpha[i] * d[i];
  return v;
}

// ---------------------------------------------------------------------------
// Inequality file I/O.
// Format: {"n_parties": int, "n_settings": int,
//          "one_body": [m], "two_body": [[m] x m]}

inline void save_inequality(const std::string& path, const Scenario& sc,
                            const BellCoefficients& c) {
  nlohmann::json j;
  j["n_parties"] = sc.n_parties;
  j["n_settings"] = sc.n_settings;
  j["one_body"] = std::vector<double>(c.one_body.data(), c.one_body.data() + c.one_body.size());
  std::vector<std::vector<double>> tb;
  for (int k = 0; k < c.two_body.rows(); ++k) {
    std::vector<double> row;
    for (int l = 0; l < c.two_body.cols(); ++l)
      row.push_back(0.5 * (c.two_body(k, l) + c.two_body(l, k)));
    tb.push_back(row);
  }
  j["two_body"] = tb;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_inequality: cannot open " + path);
  f << j.dump(2) << "\n";
}

inline std::pair<Scenario, BellCoefficients> load_inequality(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_inequality: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_inequality: parse failure: " + std::string(e.what()));
  }
  Scenario sc(j.at("n_parties").get<int>(), j.at("n_settings").get<int>());
  const int m = sc.n_settings;
  auto ob = j.at("one_body").get<std::vector<double>>();
  auto tb = j.at("two_body").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(ob.size()) != m || static_cast<int>(tb.size()) != m)
    throw std::runtime_error("load_inequality: wrong dimensions");
  BellCoefficients c;
  c.one_body = Eigen::Map<Vec>(ob.data(), m);
  c.two_body = Mat(m, m);
  for (int k = 0; k < m; ++k) {
    if (static_cast<int>(tb[k].size()) != m)
      throw std::runtime_error("load_inequality: ragged two_body");
    for (int l = 0; l < m; ++l) c.two_body(k, l) = tb[k][l];
  }
  c.check_symmetric();  // asymmetry beyond 1e-12 is an error
  return {sc, c};
}

}  // namespace belltight
