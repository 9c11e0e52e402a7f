#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <random>

#include "saddlepoint/measures.hpp"

using namespace saddlepoint;

namespace {
FeatureMap bernoulli_features() {
  // theta(z) = (1, z) on {0, 1}
  return FeatureMap(2, 2, {1.0, 0.0, 1.0, 1.0});
}

double rng_uniform(std::mt19937_64& eng, double lo, double hi) {
  double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}
}  // namespace

TEST_CASE("DiscreteMeasure validates its construction") {
  CHECK_THROWS_AS(DiscreteMeasure({{"a", {}}, {"a", {}}}, {1.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({{"a", {}}}, {1.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      DiscreteMeasure({{"a", {}}}, {std::numeric_limits<double>::infinity()}),
      std::invalid_argument);
  DiscreteMeasure m({{"a", {}}, {"b", {}}}, {0.25, 0.75});
  CHECK(m.size() == 2);
  CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_measure labels points z0, z1, ...") {
  auto m = make_measure({0.0, 1.0, 2.0}, {1.0, 2.0, 3.0});
  CHECK(m.support[0].id == "z0");
  CHECK(m.support[2].id == "z2");
  CHECK(m.support[1].coords[0] == 1.0);
}

TEST_CASE("push_moments on the Bernoulli features") {
  auto t = bernoulli_features();
  auto uniform = make_measure({0.0, 1.0}, {0.5, 0.5});
  auto mom = push_moments(t, uniform);
  CHECK(mom[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mom[1] == doctest::Approx(0.5).epsilon(1e-15));

  auto tilted = make_measure({0.0, 1.0}, {0.25, 0.75});
  mom = push_moments(t, tilted);
  CHECK(mom[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mom[1] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("push_moments with quadratic features on three points") {
  // theta(z) = (1, z, z^2) on {0,1,2}, uniform thirds
  FeatureMap t(3, 3, {1, 0, 0, 1, 1, 1, 1, 2, 4});
  auto q = make_measure({0.0, 1.0, 2.0},
                        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  // independent direct summation
  double m0 = 0, m1 = 0, m2 = 0;
  for (std::size_t z = 0; z < 3; ++z) {
    m0 += q.weights[z];
    m1 += q.support[z].coords[0] * q.weights[z];
    m2 += q.support[z].coords[0] * q.support[z].coords[0] * q.weights[z];
  }
  auto mom = push_moments(t, q);
  CHECK(mom[0] == doctest::Approx(m0).epsilon(1e-15));
  CHECK(mom[1] == doctest::Approx(m1).epsilon(1e-15));
  CHECK(mom[2] == doctest::Approx(m2).epsilon(1e-15));
  CHECK(mom[2] == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("adjoint_features") {
  auto t = bernoulli_features();
  SUBCASE("y = 0 gives the zero function") {
    auto u = adjoint_features(t, std::vector<double>{0.0, 0.0});
    CHECK(u[0] == 0.0);
    CHECK(u[1] == 0.0);
  }
  SUBCASE("direct product form (a, a+b)") {
    auto u = adjoint_features(t, std::vector<double>{2.0, 5.0});
    CHECK(u[0] == 2.0);
    CHECK(u[1] == 7.0);
  }
  SUBCASE("marginal features act as f + g") {
    auto tm = marginal_feature_map(2, 2);
    std::vector<double> y = {0.3, -0.2, 1.5, 0.7};  // (f1,f2,g1,g2)
    auto u = adjoint_features(tm, y);
    // row-major (i, j) order
    CHECK(u[0] == doctest::Approx(0.3 + 1.5).epsilon(1e-15));
    CHECK(u[1] == doctest::Approx(0.3 + 0.7).epsilon(1e-15));
    CHECK(u[2] == doctest::Approx(-0.2 + 1.5).epsilon(1e-15));
    CHECK(u[3] == doctest::Approx(-0.2 + 0.7).epsilon(1e-15));
  }
}

TEST_CASE("marginal_feature_map structure and moments") {
  SUBCASE("1x1 is a single row (1,1)") {
    auto t = marginal_feature_map(1, 1);
    CHECK(t.rows == 1);
    CHECK(t.cols == 2);
    CHECK(t.at(0, 0) == 1.0);
    CHECK(t.at(0, 1) == 1.0);
  }
  SUBCASE("2x2 plan moments are the marginals") {
    auto t = marginal_feature_map(2, 2);
    // plan [[.4,.3],[0,.3]] flattened row-major
    DiscreteMeasure pi({{"00", {}}, {"01", {}}, {"10", {}}, {"11", {}}},
                       {0.4, 0.3, 0.0, 0.3});
    auto mom = push_moments(t, pi);
    CHECK(mom[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(mom[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(mom[2] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(mom[3] == doctest::Approx(0.6).epsilon(1e-15));
  }
  SUBCASE("2x3 table: each row holds exactly two ones") {
    auto t = marginal_feature_map(2, 3);
    CHECK(t.rows == 6);
    CHECK(t.cols == 5);
    for (std::size_t r = 0; r < t.rows; ++r) {
      int ones = 0;
      for (std::size_t c = 0; c < t.cols; ++c) {
        CHECK((t.at(r, c) == 0.0 || t.at(r, c) == 1.0));
        if (t.at(r, c) == 1.0) ++ones;
      }
      CHECK(ones == 2);
    }
  }
}

TEST_CASE("adjointness and linearity on random data") {
  std::mt19937_64 eng(12345);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + eng() % 6, k = 1 + eng() % 4;
    FeatureMap t(n, k);
    for (double& v : t.data) v = rng_uniform(eng, -2.0, 2.0);
    std::vector<double> y(k), q1(n), q2(n);
    for (double& v : y) v = rng_uniform(eng, -2.0, 2.0);
    for (double& v : q1) v = rng_uniform(eng, -1.0, 1.0);
    for (double& v : q2) v = rng_uniform(eng, -1.0, 1.0);
    std::vector<double> coords(n);
    for (std::size_t z = 0; z < n; ++z) coords[z] = static_cast<double>(z);

    auto mq = make_measure(coords, q1);
    auto mom = push_moments(t, mq);
    auto u = adjoint_features(t, y);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < k; ++j) lhs += y[j] * mom[j];
    for (std::size_t z = 0; z < n; ++z) rhs += u[z] * q1[z];
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(lhs)));

    // linearity of push_moments
    double a = rng_uniform(eng, -2.0, 2.0), b = rng_uniform(eng, -2.0, 2.0);
    std::vector<double> mix(n);
    for (std::size_t z = 0; z < n; ++z) mix[z] = a * q1[z] + b * q2[z];
    auto mm = push_moments(t, make_measure(coords, mix));
    auto m1 = push_moments(t, make_measure(coords, q1));
    auto m2 = push_moments(t, make_measure(coords, q2));
    for (std::size_t j = 0; j < k; ++j)
      CHECK(std::fabs(mm[j] - (a * m1[j] + b * m2[j])) <=
            1e-12 * (1.0 + std::fabs(mm[j])));
  }
}

TEST_CASE("marginal consistency for arbitrary plans") {
  std::mt19937_64 eng(777);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t m = 1 + eng() % 4, n = 1 + eng() % 4;
    auto t = marginal_feature_map(m, n);
    std::vector<double> pi(m * n);
    for (double& v : pi) v = rng_uniform(eng, 0.0, 1.0);
    std::vector<double> coords(m * n);
    for (std::size_t z = 0; z < m * n; ++z) coords[z] = static_cast<double>(z);
    auto mom = push_moments(t, make_measure(coords, pi));
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += pi[i * n + j];
      CHECK(mom[i] == doctest::Approx(row).epsilon(1e-14));
    }
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < m; ++i) col += pi[i * n + j];
      CHECK(mom[m + j] == doctest::Approx(col).epsilon(1e-14));
    }
  }
}
