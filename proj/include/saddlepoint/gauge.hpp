#pragma once

#include <functional>
#include <span>
#include <vector>

#include "saddlepoint/integrands.hpp"
#include "saddlepoint/measures.hpp"

namespace saddlepoint {

/// A convex theta: R^d -> [0, inf] with theta(0) = 0, given by an evaluator.
/// Generic level-set searches (support function, conjugate) require d <= 3;
/// the gauge itself is a one-dimensional bisection along a ray and has no
/// dimension limit.
struct ConvexGaugeSpec {
  std::function<double(std::span<const double>)> theta;
  std::size_t dim = 1;
  double bracket_hi = 1e8;  // operational definition of "+inf"
  double bracket_lo = 1e-8;
};

/// Minkowski functional inf{alpha > 0 : theta(s/alpha) <= 1}. Returns 0 at
/// s = 0 (and on degenerate directions where theta vanishes identically),
/// +inf when no alpha within the bracket works.
double gauge(const ConvexGaugeSpec& spec, std::span<const double> s);

/// Support function of the unit level set: sup{<r,s> : theta(s) <= 1}.
double support_of_levelset(const ConvexGaugeSpec& spec,
                           std::span<const double> r);

/// Numeric conjugate theta*(r) = sup_s {<r,s> - theta(s)} by coordinate
/// ascent with golden-section line searches.
double conjugate_nd(const ConvexGaugeSpec& spec, std::span<const double> r);

struct SandwichResult {
  double lower = 0;  // (1/2) j_{theta*}(r)
  double mid = 0;    // support function of {theta <= 1} at r
  double upper = 0;  // 2 j_{theta*}(r)
  bool ok = false;
};

/// Two-sided gauge/support-function comparison; all three infinite counts
/// as consistent.
SandwichResult pgauge_sandwich(const ConvexGaugeSpec& spec,
                               std::span<const double> r);

/// |u|_Phi: gauge of u under max(Phi(u), Phi(-u)) with
/// Phi(u) = sum_z lambda_z(u_z) R_z. Throws on degenerate directions.
double norm_phi(const DiscreteMeasure& r, const IntegrandFamily& fam,
                std::span<const double> u);

/// |y|_Lambda computed as the gauge of y under the symmetrized composite
/// functional, then cross-checked against |T* y|_Phi; throws if the two
/// paths disagree beyond 1e-9 relative.
double norm_lambda(const DiscreteMeasure& r, const IntegrandFamily& fam,
                   const FeatureMap& t, std::span<const double> y);

}  // namespace saddlepoint
