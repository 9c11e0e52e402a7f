#include "saddlepoint/integrands.hpp"

#include <cmath>
#include <stdexcept>

namespace saddlepoint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double logistic(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  double e = std::exp(s);
  return e / (1.0 + e);
}
}  // namespace

IntegrandFamily::IntegrandFamily(Family tag) : tag_(tag) {
  if (tag == Family::Custom)
    throw std::invalid_argument("use IntegrandFamily::custom for Custom");
}

IntegrandFamily IntegrandFamily::custom(CustomIntegrand ci) {
  if (!ci.value || !ci.derivative)
    throw std::invalid_argument("custom integrand: missing evaluators");
  IntegrandFamily f(Family::Quadratic);
  f.tag_ = Family::Custom;
  f.custom_ = std::move(ci);
  return f;
}

void IntegrandFamily::set_scales(std::vector<double> c, std::vector<double> d) {
  for (double v : c)
    if (!(v > 0.0)) throw std::invalid_argument("scale c must be > 0");
  for (double v : d)
    if (!(v > 0.0)) throw std::invalid_argument("scale d must be > 0");
  scale_c_ = std::move(c);
  scale_d_ = std::move(d);
}

double IntegrandFamily::scale_c(std::size_t z) const {
  return z < scale_c_.size() ? scale_c_[z] : 1.0;
}

double IntegrandFamily::scale_d(std::size_t z) const {
  return z < scale_d_.size() ? scale_d_[z] : 1.0;
}

double IntegrandFamily::base_dom_lo() const {
  switch (tag_) {
    case Family::Custom: return custom_.dom_lo;
    default: return -kInf;
  }
}

double IntegrandFamily::base_dom_hi() const {
  switch (tag_) {
    case Family::Burg: return 1.0;
    case Family::Custom: return custom_.dom_hi;
    default: return kInf;
  }
}

double IntegrandFamily::base_value(double s) const {
  switch (tag_) {
    case Family::RelativeEntropy: return std::expm1(s);
    case Family::Quadratic: return 0.5 * s * s;
    case Family::Burg: return s < 1.0 ? -std::log1p(-s) : kInf;
    case Family::Fermi:
      return s > 0 ? s + std::log1p(std::exp(-s)) - std::log(2.0)
                   : std::log1p(std::exp(s)) - std::log(2.0);
    case Family::Custom:
      if (s <= custom_.dom_lo || s >= custom_.dom_hi) return kInf;
      return custom_.value(s);
  }
  return kInf;
}

double IntegrandFamily::base_derivative(double s) const {
  switch (tag_) {
    case Family::RelativeEntropy: return std::exp(s);
    case Family::Quadratic: return s;
    case Family::Burg: return s < 1.0 ? 1.0 / (1.0 - s) : kInf;
    case Family::Fermi: return logistic(s);
    case Family::Custom:
      if (s <= custom_.dom_lo || s >= custom_.dom_hi) return kInf;
      return custom_.derivative(s);
  }
  return kInf;
}

double IntegrandFamily::base_second(double s) const {
  switch (tag_) {
    case Family::RelativeEntropy: return std::exp(s);
    case Family::Quadratic: return 1.0;
    case Family::Burg: {
      if (s >= 1.0) return kInf;
      double r = 1.0 / (1.0 - s);
      return r * r;
    }
    case Family::Fermi: {
      double p = logistic(s);
      return p * (1.0 - p);
    }
    case Family::Custom: {
      // centered difference of the supplied derivative
      double h = 1e-6 * (1.0 + std::fabs(s));
      double lo = custom_.dom_lo, hi = custom_.dom_hi;
      double a = std::max(s - h, lo + 0.25 * h), b = std::min(s + h, hi - 0.25 * h);
      return (custom_.derivative(b) - custom_.derivative(a)) / (b - a);
    }
  }
  return kInf;
}

double IntegrandFamily::base_conjugate(double t) const {
  switch (tag_) {
    case Family::RelativeEntropy:
      if (t < 0.0) return kInf;
      if (t == 0.0) return 1.0;  // continuous extension: 0 ln 0 = 0
      return t * std::log(t) - t + 1.0;
    case Family::Quadratic: return 0.5 * t * t;
    case Family::Burg:
      if (t <= 0.0) return kInf;
      return t - 1.0 - std::log(t);
    case Family::Fermi:
      if (t < 0.0 || t > 1.0) return kInf;
      if (t == 0.0 || t == 1.0) return std::log(2.0);
      return t * std::log(t) + (1.0 - t) * std::log(1.0 - t) + std::log(2.0);
    case Family::Custom: return numeric_conjugate(*this, 0, t);
  }
  return kInf;
}

double IntegrandFamily::base_minimizer() const {
  switch (tag_) {
    case Family::RelativeEntropy: return 1.0;
    case Family::Quadratic: return 0.0;
    case Family::Burg: return 1.0;
    case Family::Fermi: return 0.5;
    case Family::Custom: return custom_.minimizer;
  }
  return 0.0;
}

double IntegrandFamily::dom_lo(std::size_t z) const {
  double lo = base_dom_lo();
  return std::isinf(lo) ? lo : lo / scale_c(z);
}

double IntegrandFamily::dom_hi(std::size_t z) const {
  double hi = base_dom_hi();
  return std::isinf(hi) ? hi : hi / scale_c(z);
}

double IntegrandFamily::value(std::size_t z, double s) const {
  return base_value(scale_c(z) * s) / scale_d(z);
}

double IntegrandFamily::derivative(std::size_t z, double s) const {
  return scale_c(z) * base_derivative(scale_c(z) * s) / scale_d(z);
}

double IntegrandFamily::second_derivative(std::size_t z, double s) const {
  double c = scale_c(z);
  return c * c * base_second(c * s) / scale_d(z);
}

double IntegrandFamily::conjugate(std::size_t z, double t) const {
  // gamma*_z(t) = gamma*(t d/c) / d
  double c = scale_c(z), d = scale_d(z);
  if (tag_ == Family::Custom) return numeric_conjugate(*this, z, t);
  return base_conjugate(t * d / c) / d;
}

double IntegrandFamily::minimizer(std::size_t z) const {
  return base_minimizer() * scale_c(z) / scale_d(z);
}

double IntegrandFamily::lambda(std::size_t z, double s) const {
  if (tag_ == Family::RelativeEntropy) {
    // expm1(cs) - cs, evaluated stably
    double cs = scale_c(z) * s;
    return (std::expm1(cs) - cs) / scale_d(z);
  }
  double v = value(z, s);
  if (std::isinf(v)) return kInf;
  return v - minimizer(z) * s;
}

double IntegrandFamily::lambda_max(std::size_t z, double s) const {
  return std::max(lambda(z, s), lambda(z, -s));
}

double integrand_eval(const IntegrandFamily& fam, std::size_t z, Quantity which,
                      double s) {
  if (std::isnan(s)) throw std::invalid_argument("integrand_eval: NaN input");
  switch (which) {
    case Quantity::Value: return fam.value(z, s);
    case Quantity::Conjugate: return fam.conjugate(z, s);
    case Quantity::Derivative: return fam.derivative(z, s);
    case Quantity::Lambda: return fam.lambda(z, s);
    case Quantity::LambdaMax: return fam.lambda_max(z, s);
  }
  throw std::invalid_argument("integrand_eval: bad quantity");
}

double numeric_conjugate(const IntegrandFamily& fam, std::size_t z, double t) {
  if (std::isnan(t)) throw std::invalid_argument("numeric_conjugate: NaN");
  auto obj = [&](double s) {
    double g = fam.value(z, s);
    if (!std::isfinite(g)) return -kInf;
    return t * s - g;
  };
  const double lo_dom = fam.dom_lo(z), hi_dom = fam.dom_hi(z);

  double best = obj(0.0);  // gamma_z(0) = 0, always finite
  double prev_best = best;
  for (double bound = 1.0; bound <= 1e8; bound *= 4.0) {
    double lo = std::isinf(lo_dom) ? -bound
                                   : lo_dom + 1e-14 * (1.0 + std::fabs(lo_dom));
    double hi = std::isinf(hi_dom) ? bound
                                   : hi_dom - 1e-14 * (1.0 + std::fabs(hi_dom));
    if (lo >= hi) break;
    // golden-section maximize on [lo, hi]
    const double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = obj(x1), f2 = obj(x2);
    for (int it = 0; it < 220 && (b - a) > 1e-13 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + phi * (b - a); f2 = obj(x2);
      } else {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - phi * (b - a); f1 = obj(x1);
      }
    }
    double xm = 0.5 * (a + b), fm = obj(xm);
    fm = std::max(fm, std::max(f1, f2));
    best = std::max(best, fm);
    // interior maximizer: done; otherwise expand the artificial bracket
    bool at_lower_edge = std::isinf(lo_dom) && xm < lo + 0.01 * bound;
    bool at_upper_edge = std::isinf(hi_dom) && xm > hi - 0.01 * bound;
    if (!at_lower_edge && !at_upper_edge) return best;
    if (best > 1e13) return kInf;  // supremum diverges
    if (bound * 4.0 > 1e8 &&
        best - prev_best > 1e-10 * (1.0 + std::fabs(best)))
      return kInf;  // still growing at the bracket cap
    prev_best = best;
  }
  if (best > 1e13) return kInf;
  return best;  // bounded limit approached at infinity
}

double entropy_value(const IntegrandFamily& fam, const DiscreteMeasure& r,
                     const DiscreteMeasure& q) {
  if (r.size() != q.size())
    throw std::invalid_argument("entropy_value: support mismatch");
  for (std::size_t z = 0; z < r.size(); ++z) {
    if (!(r.weights[z] > 0.0))
      throw std::invalid_argument("entropy_value: reference not positive");
    if (r.support[z].id != q.support[z].id)
      throw std::invalid_argument("entropy_value: support mismatch");
  }
  double total = 0.0;
  for (std::size_t z = 0; z < r.size(); ++z) {
    double v = fam.conjugate(z, q.weights[z] / r.weights[z]);
    if (!std::isfinite(v)) return kInf;
    total += v * r.weights[z];
  }
  return total;
}

}  // namespace saddlepoint
