#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "saddlepoint/io.hpp"
#include "saddlepoint/oracles.hpp"
#include "saddlepoint/transport.hpp"

using namespace saddlepoint;

namespace {
TransportProblem swap_cost() {
  // mu = nu = (1/2, 1/2), zero-cost matching on the diagonal
  return {{0.5, 0.5}, {0.5, 0.5}, {{0.0, 1.0}, {1.0, 0.0}}};
}

TransportProblem cost03() {
  // optimal value 0.3 with plan [[0.4, 0.3], [0, 0.3]]
  return {{0.7, 0.3}, {0.4, 0.6}, {{0.0, 1.0}, {1.0, 0.0}}};
}
}  // namespace

TEST_CASE("validation rejects malformed instances") {
  CHECK_THROWS_AS(TransportProblem({0.5, 0.6}, {0.5, 0.5},
                                   {{0, 0}, {0, 0}})
                      .validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(TransportProblem({0.5, 0.5}, {1.0}, {{0.0}, {0.0}, {0.0}})
                      .validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(TransportProblem({1.0}, {1.0}, {{-1.0}}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(TransportProblem({-0.5, 1.5}, {0.5, 0.5},
                                   {{0, 0}, {0, 0}})
                      .validate(),
                  std::invalid_argument);
}

TEST_CASE("zero-cost diagonal matching") {
  auto res = solve_ot(swap_cost());
  CHECK(res.cert.primal_value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(res.plan.pi[0][0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res.plan.pi[1][1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res.plan.pi[0][1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(res.cert.gap == 0.0);
  // dual value 0 and feasible potentials
  double dual = 0.0;
  for (std::size_t i = 0; i < 2; ++i) dual += res.pot.f[i] * 0.5;
  for (std::size_t j = 0; j < 2; ++j) dual += res.pot.g[j] * 0.5;
  CHECK(dual == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("the 0.3-cost instance") {
  auto p = cost03();
  auto res = solve_ot(p);
  CHECK(res.cert.primal_value == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(res.cert.dual_value == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(res.plan.pi[0][0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(res.plan.pi[0][1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(res.plan.pi[1][0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(res.plan.pi[1][1] == doctest::Approx(0.3).epsilon(1e-15));
  // normalized potentials f = (0, -1), g = (0, 1)
  CHECK(res.pot.f[0] == 0.0);
  CHECK(res.pot.f[1] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(res.pot.g[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(res.pot.g[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(slackness_check(p, res.plan, res.pot).empty());
}

TEST_CASE("forced single-source plan") {
  TransportProblem p{{1.0}, {0.5, 0.5}, {{0.0, 1.0}}};
  auto res = solve_ot(p);
  CHECK(res.plan.pi[0][0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res.plan.pi[0][1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res.cert.primal_value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res.cert.gap == 0.0);
}

TEST_CASE("c-transform") {
  auto p = swap_cost();
  SUBCASE("g = 0 gives the row minima") {
    auto f = c_transform_rows(p, std::vector<double>{0.0, 0.0});
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 0.0);
  }
  SUBCASE("g = (0, 1) gives f = (0, -1)") {
    auto f = c_transform_rows(p, std::vector<double>{0.0, 1.0});
    CHECK(f[0] == 0.0);
    CHECK(f[1] == -1.0);
  }
  SUBCASE("round trip is idempotent") {
    std::vector<double> g0 = {0.2, -0.7};
    auto f1 = c_transform_rows(p, g0);
    auto g1 = c_transform_cols(p, f1);
    auto f2 = c_transform_rows(p, g1);
    auto g2 = c_transform_cols(p, f2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(f1[i] == f2[i]);
    for (std::size_t j = 0; j < 2; ++j) CHECK(g1[j] == g2[j]);
  }
  SUBCASE("the transformed pair is dual feasible") {
    auto f = c_transform_rows(p, std::vector<double>{0.3, 0.9});
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(f[i] + std::vector<double>{0.3, 0.9}[j] <= p.cost[i][j] + 1e-15);
  }
}

TEST_CASE("slackness_check") {
  auto p = cost03();
  SUBCASE("solver output is slack-free") {
    auto res = solve_ot(p);
    CHECK(slackness_check(p, res.plan, res.pot).empty());
  }
  SUBCASE("the independent coupling violates slackness") {
    TransportPlan indep;
    indep.pi = {{0.7 * 0.4, 0.7 * 0.6}, {0.3 * 0.4, 0.3 * 0.6}};
    auto res = solve_ot(p);  // optimal potentials
    auto viol = slackness_check(p, indep, res.pot);
    CHECK_FALSE(viol.empty());
  }
  SUBCASE("1x1 problems are always slack-free") {
    TransportProblem one{{1.0}, {1.0}, {{0.7}}};
    auto res = solve_ot(one);
    CHECK(slackness_check(one, res.plan, res.pot).empty());
  }
}

TEST_CASE("solver matches the vertex oracle on dyadic instances") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::size_t m = 1 + seed % 4, n = 1 + (seed / 4) % 4;
    auto pf = gen_ot_instance(seed, m, n);
    auto res = solve_ot(pf.ot);
    double oracle = ot_oracle_vertices(pf.ot);
    CHECK(std::fabs(res.cert.primal_value - oracle) <= 1e-9);
    CHECK(res.cert.gap >= 0.0);
    CHECK(res.cert.gap <= 1e-9);
    CHECK(slackness_check(pf.ot, res.plan, res.pot).empty());
    // marginals are met exactly on dyadic data
    CHECK(res.cert.kkt.constraint_residual == 0.0);
    // normalization
    CHECK(res.pot.f[0] == 0.0);
  }
}
