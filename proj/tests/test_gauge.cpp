#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <random>

#include "saddlepoint/gauge.hpp"

using namespace saddlepoint;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double rng_uniform(std::mt19937_64& eng, double lo, double hi) {
  double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

ConvexGaugeSpec square_spec() {
  ConvexGaugeSpec s;
  s.dim = 1;
  s.theta = [](std::span<const double> v) { return v[0] * v[0]; };
  return s;
}
}  // namespace

TEST_CASE("gauge of the square") {
  auto spec = square_spec();
  CHECK(gauge(spec, std::vector<double>{3.0}) ==
        doctest::Approx(3.0).epsilon(1e-9));
  CHECK(gauge(spec, std::vector<double>{0.0}) == 0.0);
  CHECK(gauge(spec, std::vector<double>{-3.0}) ==
        doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("gauge of the symmetrized relative-entropy integrand") {
  // theta(s) = e^{|s|} - 1 - |s|; the unit level set ends at the root of
  // e^s - s = 2, s* ~ 1.14619
  ConvexGaugeSpec spec;
  spec.dim = 1;
  spec.theta = [](std::span<const double> v) {
    double a = std::fabs(v[0]);
    return std::expm1(a) - a;
  };
  // independent root-find for s*: bisection on e^s - s - 2
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (std::exp(mid) - mid - 2.0 > 0 ? hi : lo) = mid;
  }
  double s_star = 0.5 * (lo + hi);
  CHECK(s_star == doctest::Approx(1.14619).epsilon(1e-4));
  CHECK(gauge(spec, std::vector<double>{s_star}) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("gauge positive homogeneity") {
  std::mt19937_64 eng(31);
  ConvexGaugeSpec spec;
  spec.dim = 2;
  spec.theta = [](std::span<const double> v) {
    return v[0] * v[0] + 0.5 * std::fabs(v[1]);
  };
  for (int i = 0; i < 30; ++i) {
    std::vector<double> s = {rng_uniform(eng, -2, 2), rng_uniform(eng, -2, 2)};
    double a = rng_uniform(eng, 0.1, 5.0);
    std::vector<double> as = {a * s[0], a * s[1]};
    double g = gauge(spec, s);
    CHECK(std::fabs(gauge(spec, as) - a * g) <= 1e-7 * (1 + a * g));
  }
}

TEST_CASE("support function of level sets") {
  auto spec = square_spec();
  CHECK(support_of_levelset(spec, std::vector<double>{2.0}) ==
        doctest::Approx(2.0).epsilon(1e-6));
  CHECK(support_of_levelset(spec, std::vector<double>{0.0}) ==
        doctest::Approx(0.0).epsilon(1e-9));
  ConvexGaugeSpec wide;
  wide.dim = 1;
  wide.theta = [](std::span<const double> v) { return v[0] * v[0] / 4.0; };
  CHECK(support_of_levelset(wide, std::vector<double>{1.0}) ==
        doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("support function in two dimensions vs closed form") {
  // theta(s) = (s1^2 + s2^2) / 2: level set is the disc of radius sqrt(2),
  // support function sqrt(2)|r|
  ConvexGaugeSpec spec;
  spec.dim = 2;
  spec.theta = [](std::span<const double> v) {
    return 0.5 * (v[0] * v[0] + v[1] * v[1]);
  };
  std::mt19937_64 eng(8);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> r = {rng_uniform(eng, -3, 3), rng_uniform(eng, -3, 3)};
    double expect = std::sqrt(2.0 * (r[0] * r[0] + r[1] * r[1]));
    CHECK(std::fabs(support_of_levelset(spec, r) - expect) <=
          1e-5 * (1 + expect));
  }
}

TEST_CASE("sandwich on the quadratic closed form") {
  auto spec = square_spec();
  auto sw = pgauge_sandwich(spec, std::vector<double>{2.0});
  CHECK(sw.ok);
  CHECK(sw.lower == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sw.mid == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sw.upper == doctest::Approx(2.0).epsilon(1e-9));

  auto zero = pgauge_sandwich(spec, std::vector<double>{0.0});
  CHECK(zero.ok);
  CHECK(zero.lower == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(zero.mid == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(zero.upper == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("sandwich sweep over the symmetrized relative-entropy theta") {
  IntegrandFamily re(Family::RelativeEntropy);
  ConvexGaugeSpec spec;
  spec.dim = 1;
  spec.theta = [&re](std::span<const double> v) {
    return re.lambda_max(0, v[0]);
  };
  std::mt19937_64 eng(64);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> r = {rng_uniform(eng, -10.0, 10.0)};
    auto sw = pgauge_sandwich(spec, r);
    CHECK(sw.ok);
  }
}

TEST_CASE("norm_phi closed form and axioms") {
  IntegrandFamily quad(Family::Quadratic);
  auto r = make_measure({0.0, 1.0}, {0.5, 0.5});
  CHECK(norm_phi(r, quad, std::vector<double>{2.0, 0.0}) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(norm_phi(r, quad, std::vector<double>{0.0, 0.0}) == 0.0);

  std::mt19937_64 eng(21);
  for (Family f : {Family::RelativeEntropy, Family::Quadratic, Family::Burg,
                   Family::Fermi}) {
    IntegrandFamily fam(f);
    for (int i = 0; i < 25; ++i) {
      std::vector<double> u = {rng_uniform(eng, -2, 2), rng_uniform(eng, -2, 2)};
      std::vector<double> v = {rng_uniform(eng, -2, 2), rng_uniform(eng, -2, 2)};
      double a = rng_uniform(eng, 0.2, 3.0);
      double nu = norm_phi(r, fam, u);
      double nv = norm_phi(r, fam, v);
      // absolute homogeneity
      std::vector<double> au = {a * u[0], a * u[1]};
      std::vector<double> mu = {-u[0], -u[1]};
      CHECK(std::fabs(norm_phi(r, fam, au) - a * nu) <= 1e-8 * (1 + a * nu));
      CHECK(std::fabs(norm_phi(r, fam, mu) - nu) <= 1e-8 * (1 + nu));
      // triangle inequality
      std::vector<double> s = {u[0] + v[0], u[1] + v[1]};
      CHECK(norm_phi(r, fam, s) <= nu + nv + 1e-8 * (1 + nu + nv));
    }
  }
}

TEST_CASE("norm_lambda agrees with the adjoint path") {
  IntegrandFamily quad(Family::Quadratic);
  auto r = make_measure({0.0, 1.0}, {0.5, 0.5});
  FeatureMap t(2, 1, {0.0, 1.0});  // theta(z) = z on {0, 1}
  // |T* y|_Phi with T*y = (0, 2): quadratic closed form sqrt(sum u^2 R / 2) = 1
  double nl = norm_lambda(r, quad, t, std::vector<double>{2.0});
  CHECK(nl == doctest::Approx(1.0).epsilon(1e-8));
  double np = norm_phi(r, quad, adjoint_features(t, std::vector<double>{2.0}));
  CHECK(std::fabs(nl - np) <= 1e-9 * (1 + nl));
}

TEST_CASE("norm identity holds on random problems") {
  std::mt19937_64 eng(55);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + eng() % 4, k = 1 + eng() % 2;
    std::vector<double> coords(n), w(n);
    for (std::size_t z = 0; z < n; ++z) {
      coords[z] = static_cast<double>(z);
      w[z] = rng_uniform(eng, 0.2, 1.0);
    }
    auto r = make_measure(coords, w);
    FeatureMap t(n, k);
    for (double& v : t.data) v = rng_uniform(eng, -1.0, 1.0);
    Family fams[] = {Family::RelativeEntropy, Family::Quadratic, Family::Burg,
                     Family::Fermi};
    IntegrandFamily fam(fams[trial % 4]);
    std::vector<double> y(k);
    for (double& v : y) v = rng_uniform(eng, -2.0, 2.0);
    // norm_lambda certifies the two computation paths internally and throws
    // on disagreement beyond 1e-9
    double nl = norm_lambda(r, fam, t, y);
    CHECK(std::isfinite(nl));
    CHECK(nl >= 0.0);
  }
}

TEST_CASE("gauge is infinite beyond the bracket") {
  // theta identically 1 away from 0 traps every ray outside the level set
  ConvexGaugeSpec spec;
  spec.dim = 1;
  spec.theta = [](std::span<const double> v) {
    return v[0] == 0.0 ? 0.0 : 2.0;
  };
  CHECK(gauge(spec, std::vector<double>{1.0}) == kInf);
}
