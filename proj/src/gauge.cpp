#include "saddlepoint/gauge.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace saddlepoint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_zero(std::span<const double> s) {
  for (double v : s)
    if (v != 0.0) return false;
  return true;
}

// inf{alpha in [lo, hi] : pred(alpha)} for a monotone predicate, or +inf.
// pred(alpha) = "theta(s/alpha) <= 1": false below the gauge, true above.
double bisect_gauge(const std::function<bool(double)>& pred, double lo,
                    double hi) {
  if (!pred(hi)) return kInf;
  if (pred(lo)) return 0.0;  // degenerate direction, gauge below bracket
  for (int it = 0; it < 260; ++it) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-13 * (1.0 + hi)) break;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Largest t in [0, cap] with theta(t * u) <= 1 (theta is nondecreasing along
// rays from 0). Returns cap when the ray never leaves the level set.
double boundary_radius(const ConvexGaugeSpec& spec, std::span<const double> u,
                       double cap) {
  std::vector<double> p(u.size());
  auto inside = [&](double t) {
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = t * u[i];
    double v = spec.theta(p);
    return v <= 1.0;
  };
  if (inside(cap)) return cap;
  double lo = 0.0, hi = cap;
  for (int it = 0; it < 260; ++it) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-13 * (1.0 + hi)) break;
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

// Golden-section maximization of a concave 1-d function on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double* arg = nullptr) {
  const double phi = 0.6180339887498949;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = f(x1);
    }
  }
  double xm = 0.5 * (a + b), fm = f(xm);
  if (fm < f1) { fm = f1; xm = x1; }
  if (fm < f2) { fm = f2; xm = x2; }
  if (arg) *arg = xm;
  return fm;
}
}  // namespace

double gauge(const ConvexGaugeSpec& spec, std::span<const double> s) {
  if (s.size() != spec.dim)
    throw std::invalid_argument("gauge: dimension mismatch");
  for (double v : s)
    if (!std::isfinite(v)) throw std::invalid_argument("gauge: non-finite s");
  if (is_zero(s)) return 0.0;
  std::vector<double> p(s.size());
  auto pred = [&](double alpha) {
    for (std::size_t i = 0; i < s.size(); ++i) p[i] = s[i] / alpha;
    return spec.theta(p) <= 1.0;
  };
  return bisect_gauge(pred, spec.bracket_lo, spec.bracket_hi);
}

double support_of_levelset(const ConvexGaugeSpec& spec,
                           std::span<const double> r) {
  if (r.size() != spec.dim)
    throw std::invalid_argument("support_of_levelset: dimension mismatch");
  if (spec.dim > 3)
    throw std::invalid_argument("support_of_levelset: d <= 3 required");
  if (is_zero(r)) return 0.0;
  const double cap = spec.bracket_hi;

  if (spec.dim == 1) {
    double rp = boundary_radius(spec, std::vector<double>{1.0}, cap);
    double rm = boundary_radius(spec, std::vector<double>{-1.0}, cap);
    double best = std::max(r[0] * rp, -r[0] * rm);
    if ((rp >= cap && r[0] > 0) || (rm >= cap && r[0] < 0)) return kInf;
    return std::max(best, 0.0);
  }

  // value of the best point on the boundary in direction u
  auto dir_value = [&](std::span<const double> u, bool* unbounded) {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += r[i] * u[i];
    double rho = boundary_radius(spec, u, cap);
    if (rho >= cap && dot > 0) {
      *unbounded = true;
      return kInf;
    }
    return rho * dot;
  };

  bool unbounded = false;
  if (spec.dim == 2) {
    auto value_at_angle = [&](double a) {
      std::vector<double> u = {std::cos(a), std::sin(a)};
      return dir_value(u, &unbounded);
    };
    const int grid = 1024;
    double best = -kInf, best_a = 0.0;
    for (int i = 0; i < grid; ++i) {
      double a = 2.0 * std::numbers::pi * i / grid;
      double v = value_at_angle(a);
      if (unbounded) return kInf;
      if (v > best) { best = v; best_a = a; }
    }
    double w = 2.0 * std::numbers::pi / grid;
    double polished =
        golden_max([&](double a) { return value_at_angle(a); }, best_a - w,
                   best_a + w);
    if (unbounded) return kInf;
    return std::max(best, polished);
  }

  // d == 3: Fibonacci sphere grid, then local polish on spherical angles.
  auto dir_of = [&](double phi, double psi) {
    return std::vector<double>{std::sin(phi) * std::cos(psi),
                               std::sin(phi) * std::sin(psi), std::cos(phi)};
  };
  auto value_at = [&](double phi, double psi) {
    auto u = dir_of(phi, psi);
    return dir_value(u, &unbounded);
  };
  const int npts = 4000;
  double best = -kInf, best_phi = 0.0, best_psi = 0.0;
  const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < npts; ++i) {
    double zc = 1.0 - 2.0 * (i + 0.5) / npts;
    double phi = std::acos(zc);
    double psi = ga * i;
    double v = value_at(phi, psi);
    if (unbounded) return kInf;
    if (v > best) { best = v; best_phi = phi; best_psi = psi; }
  }
  double w = 4.0 / std::sqrt(static_cast<double>(npts));
  for (int round = 0; round < 6; ++round) {
    double p1;
    golden_max([&](double a) { return value_at(a, best_psi); }, best_phi - w,
               best_phi + w, &p1);
    best_phi = p1;
    golden_max([&](double a) { return value_at(best_phi, a); }, best_psi - w,
               best_psi + w, &p1);
    best_psi = p1;
    w *= 0.35;
    if (unbounded) return kInf;
  }
  best = std::max(best, value_at(best_phi, best_psi));
  if (unbounded) return kInf;
  return best;
}

double conjugate_nd(const ConvexGaugeSpec& spec, std::span<const double> r) {
  if (r.size() != spec.dim)
    throw std::invalid_argument("conjugate_nd: dimension mismatch");
  if (spec.dim == 1) {
    // reuse the 1-d machinery on the evaluator directly
    std::vector<double> p(1);
    auto obj = [&](double s) {
      p[0] = s;
      double v = spec.theta(p);
      return std::isfinite(v) ? r[0] * s - v : -kInf;
    };
    double best = obj(0.0), prev = best;
    for (double bound = 1.0; bound <= 1e8; bound *= 4.0) {
      double xm;
      double v = golden_max(obj, -bound, bound, &xm);
      best = std::max(best, v);
      if (std::fabs(xm) < 0.99 * bound) return best;
      if (best > 1e13) return kInf;
      if (bound * 4.0 > 1e8 && best - prev > 1e-10 * (1.0 + std::fabs(best)))
        return kInf;
      prev = best;
    }
    return best > 1e13 ? kInf : best;
  }

  // coordinate ascent; the objective is concave
  std::vector<double> s(spec.dim, 0.0);
  auto obj_at = [&]() {
    double v = spec.theta(s);
    if (!std::isfinite(v)) return -kInf;
    double dot = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) dot += r[i] * s[i];
    return dot - v;
  };
  double cur = obj_at();
  for (int sweep = 0; sweep < 80; ++sweep) {
    double before = cur;
    for (std::size_t i = 0; i < spec.dim; ++i) {
      double keep = s[i];
      auto line = [&](double si) {
        s[i] = si;
        double v = obj_at();
        s[i] = keep;
        return v;
      };
      double best_si = keep, best_v = cur;
      for (double bound = 1.0; bound <= 1e8; bound *= 4.0) {
        double xm;
        double v = golden_max(line, keep - bound, keep + bound, &xm);
        if (v > best_v) { best_v = v; best_si = xm; }
        if (std::fabs(xm - keep) < 0.99 * bound) break;
        if (best_v > 1e13) return kInf;
      }
      s[i] = best_si;
      cur = best_v;
    }
    if (cur > 1e13) return kInf;
    if (cur - before <= 1e-12 * (1.0 + std::fabs(cur))) break;
  }
  return cur;
}

SandwichResult pgauge_sandwich(const ConvexGaugeSpec& spec,
                               std::span<const double> r) {
  if (spec.dim > 3)
    throw std::invalid_argument("pgauge_sandwich: d <= 3 required");
  SandwichResult res;
  res.mid = support_of_levelset(spec, r);

  ConvexGaugeSpec conj_spec;
  conj_spec.dim = spec.dim;
  conj_spec.bracket_hi = spec.bracket_hi;
  conj_spec.bracket_lo = spec.bracket_lo;
  conj_spec.theta = [&spec](std::span<const double> q) {
    return conjugate_nd(spec, q);
  };
  double j = gauge(conj_spec, r);
  res.lower = 0.5 * j;
  res.upper = 2.0 * j;

  if (std::isinf(res.lower) && std::isinf(res.mid) && std::isinf(res.upper)) {
    res.ok = true;
    return res;
  }
  auto leq = [](double a, double b) {
    if (std::isinf(b) && b > 0) return true;
    return a <= b * (1.0 + 1e-6) + 1e-9;
  };
  res.ok = leq(res.lower, res.mid) && leq(res.mid, res.upper);
  return res;
}

namespace {
double phi_functional(const DiscreteMeasure& r, const IntegrandFamily& fam,
                      std::span<const double> u, double sign) {
  double total = 0.0;
  for (std::size_t z = 0; z < r.size(); ++z) {
    double v = fam.lambda(z, sign * u[z]);
    if (!std::isfinite(v)) return kInf;
    total += v * r.weights[z];
  }
  return total;
}
}  // namespace

double norm_phi(const DiscreteMeasure& r, const IntegrandFamily& fam,
                std::span<const double> u) {
  if (u.size() != r.size())
    throw std::invalid_argument("norm_phi: dimension mismatch");
  if (is_zero(u)) return 0.0;
  std::vector<double> p(u.size());
  auto pred = [&](double alpha) {
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = u[i] / alpha;
    double v = std::max(phi_functional(r, fam, p, 1.0),
                        phi_functional(r, fam, p, -1.0));
    return v <= 1.0;
  };
  if (pred(1e-8))
    throw std::invalid_argument("norm_phi: degenerate direction (Phi vanishes)");
  double g = bisect_gauge(pred, 1e-8, 1e8);
  return g;
}

double norm_lambda(const DiscreteMeasure& r, const IntegrandFamily& fam,
                   const FeatureMap& t, std::span<const double> y) {
  if (y.size() != t.cols)
    throw std::invalid_argument("norm_lambda: dimension mismatch");
  if (is_zero(y)) return 0.0;
  std::vector<double> ys(y.size());
  auto pred = [&](double alpha) {
    for (std::size_t i = 0; i < y.size(); ++i) ys[i] = y[i] / alpha;
    auto u = adjoint_features(t, ys);
    double v = std::max(phi_functional(r, fam, u, 1.0),
                        phi_functional(r, fam, u, -1.0));
    return v <= 1.0;
  };
  if (pred(1e-8))
    throw std::invalid_argument(
        "norm_lambda: degenerate direction (T* y in the kernel of Phi)");
  double via_lambda = bisect_gauge(pred, 1e-8, 1e8);
  double via_phi = norm_phi(r, fam, adjoint_features(t, y));
  if (std::fabs(via_lambda - via_phi) > 1e-9 * (1.0 + via_lambda))
    throw std::logic_error("norm_lambda: the two computation paths disagree");
  return via_lambda;
}

}  // namespace saddlepoint
