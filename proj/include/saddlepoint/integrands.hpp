#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "saddlepoint/measures.hpp"

namespace saddlepoint {

enum class Family { RelativeEntropy, Quadratic, Burg, Fermi, Custom };

/// User-supplied integrand: gamma with its derivative and open/closed domain.
/// The conjugate is derived numerically; strict convexity is only asserted by
/// sampled monotonicity of the derivative.
struct CustomIntegrand {
  std::function<double(double)> value;       // gamma(s)
  std::function<double(double)> derivative;  // gamma'(s)
  double dom_lo = -std::numeric_limits<double>::infinity();
  double dom_hi = std::numeric_limits<double>::infinity();
  double minimizer = 0.0;  // m = argmin of gamma*, i.e. gamma'(0)
};

/// Per-point convex integrand family gamma_z with conjugate gamma*_z,
/// normalizer m(z) and the shifted nonnegative lambda_z. Per-point scaling
/// gamma_z(s) = gamma(c_z * s) / d_z with c_z, d_z > 0; default c = d = 1.
class IntegrandFamily {
 public:
  explicit IntegrandFamily(Family tag);
  static IntegrandFamily custom(CustomIntegrand ci);

  /// Installs per-point scales; vectors may be empty (meaning all ones).
  void set_scales(std::vector<double> c, std::vector<double> d);

  Family tag() const { return tag_; }

  double value(std::size_t z, double s) const;        // gamma_z(s)
  double derivative(std::size_t z, double s) const;   // gamma'_z(s)
  double second_derivative(std::size_t z, double s) const;
  double conjugate(std::size_t z, double t) const;    // gamma*_z(t)
  double minimizer(std::size_t z) const;              // m(z)
  double lambda(std::size_t z, double s) const;       // gamma_z(s) - m(z) s
  double lambda_max(std::size_t z, double s) const;   // max(lambda(s),lambda(-s))

  double dom_lo(std::size_t z) const;  // open lower end of dom gamma_z
  double dom_hi(std::size_t z) const;  // open upper end of dom gamma_z

  double scale_c(std::size_t z) const;
  double scale_d(std::size_t z) const;
  const std::vector<double>& scales_c() const { return scale_c_; }
  const std::vector<double>& scales_d() const { return scale_d_; }

 private:
  Family tag_;
  CustomIntegrand custom_;
  std::vector<double> scale_c_;  // empty == all ones
  std::vector<double> scale_d_;

  double base_value(double s) const;
  double base_derivative(double s) const;
  double base_second(double s) const;
  double base_conjugate(double t) const;
  double base_minimizer() const;
  double base_dom_lo() const;
  double base_dom_hi() const;
};

enum class Quantity { Value, Conjugate, Derivative, Lambda, LambdaMax };

/// Dispatching evaluator; +inf outside domains, throws on NaN input.
double integrand_eval(const IntegrandFamily& fam, std::size_t z, Quantity which,
                      double s);

/// sup_s { t s - gamma_z(s) } by bracketed golden-section on the concave
/// objective; the independent oracle for the closed-form conjugates. Returns
/// the limit value when the supremum is approached at infinity but bounded,
/// +inf when unbounded.
double numeric_conjugate(const IntegrandFamily& fam, std::size_t z, double t);

/// I(Q) = sum_z gamma*_z(Q_z / R_z) R_z; +inf when a ratio leaves dom gamma*.
double entropy_value(const IntegrandFamily& fam, const DiscreteMeasure& r,
                     const DiscreteMeasure& q);

}  // namespace saddlepoint
