#include <belltight/classical.hpp>
#include <belltight/scenario.hpp>
#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <random>

#include "oracle.hpp"

using namespace belltight;

TEST_CASE("scenario validation and dimensions") {
  Scenario sc(4, 2);
  CHECK(sc.design_dim() == 5);
  CHECK(sc.n_strategies() == 4);
  CHECK(Scenario(3, 3).design_dim() == 9);
  CHECK_THROWS_AS(Scenario(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Scenario(3, 1), std::invalid_argument);
}

TEST_CASE("pair_index layout") {
  // m = 2: [a0, a1, a00, a01, a11]
  CHECK(pair_index(2, 0, 0) == 2);
  CHECK(pair_index(2, 0, 1) == 3);
  CHECK(pair_index(2, 1, 1) == 4);
  CHECK(pair_index(2, 1, 0) == 3);  // symmetric access
  // m = 3: [a0,a1,a2, a00,a01,a02, a11,a12, a22]
  CHECK(pair_index(3, 0, 0) == 3);
  CHECK(pair_index(3, 0, 2) == 5);
  CHECK(pair_index(3, 1, 1) == 6);
  CHECK(pair_index(3, 1, 2) == 7);
  CHECK(pair_index(3, 2, 2) == 8);
}

TEST_CASE("flatten and unflatten round-trip") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int m : {2, 3, 4}) {
    const int M = m * (m + 3) / 2;
    Vec a(M);
    for (int i = 0; i < M; ++i) a[i] = g(rng);
    BellCoefficients c = unflatten(a, m);
    CHECK((flatten(c) - a).cwiseAbs().maxCoeff() == 0.0);
    // two_body is symmetric by construction
    CHECK((c.two_body - c.two_body.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("flatten rejects asymmetric coefficients") {
  Mat tb(2, 2);
  tb << 1, 2, 3, 1;
  CHECK_THROWS_AS(BellCoefficients(Vec::Zero(2), tb), std::invalid_argument);
}

TEST_CASE("design vectors reproduce raw-spin functional values") {
  // verifies d_k = S_k, d_kl = S_k S_l - Z_kl, d_kk = (S_k^2 - N)/2 against a
  // spin-by-spin evaluation that never touches the design convention
  Scenario sc(3, 2);
  Vec alpha(5);
  alpha << 1, -2, 3, -1, 2;
  std::vector<int> strat = {0, 1, 3};  // one party per strategy 0, 1, 3
  Vertex v = Vertex::from_counts({1, 1, 0, 1}, sc);
  CHECK(functional_value(alpha, v.design) ==
        Catch::Approx(oracle::assignment_value(alpha, strat, 2)).margin(1e-12));
  for (int i = 0; i < v.design.size(); ++i)
    CHECK(v.design[i] == std::round(v.design[i]));  // integrality of vertices
}

TEST_CASE("integral detection") {
  Vec a(3);
  a << 1, -2, 3;
  CHECK(is_integral(a));
  a[1] = -2.0000001;
  CHECK_FALSE(is_integral(a));
}

TEST_CASE("functional_value_int exactness") {
  std::vector<int64_t> alpha = {1000000, -999999, 123456};
  std::vector<int64_t> d = {-500000, 400000, 70000};
  CHECK(functional_value_int(alpha, d) ==
        1000000LL * -500000 + -999999LL * 400000 + 123456LL * 70000);
  CHECK_THROWS_AS(functional_value_int({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("inequality file round-trip") {
  Scenario sc(4, 2);
  Vec a(5);
  a << 0, 0, 6, 2, -1;
  BellCoefficients c = unflatten(a, 2);
  const std::string path = "roundtrip_test.json";
  save_inequality(path, sc, c);
  auto [sc2, c2] = load_inequality(path);
  CHECK(sc2.n_parties == 4);
  CHECK(sc2.n_settings == 2);
  CHECK((flatten(c2) - a).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("loading rejects malformed files") {
  const std::string path = "bad_test.json";
  {
    std::ofstream f(path);
    f << "{\"n_parties\": 2, \"n_settings\": 2, \"one_body\": [0,0], "
         "\"two_body\": [[1, 2],[3, 1]]}";
  }
  CHECK_THROWS(load_inequality(path));  // asymmetric two_body
  {
    std::ofstream f(path);
    f << "{not json";
  }
  CHECK_THROWS_AS(load_inequality(path), std::runtime_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_inequality("no_such_file.json"), std::runtime_error);
}

TEST_CASE("functional_value dimension check") {
  CHECK_THROWS_AS(functional_value(Vec::Zero(5), Vec::Zero(4)), std::invalid_argument);
}
