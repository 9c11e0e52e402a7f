#include "saddlepoint/certificates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace saddlepoint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void MomentProblem::validate() const {
  const std::size_t n = reference.size();
  if (n == 0) throw std::invalid_argument("problem: empty support");
  for (double w : reference.weights)
    if (!(w > 0.0))
      throw std::invalid_argument("problem: reference must be strictly positive");
  if (features.rows != n)
    throw std::invalid_argument("problem: feature rows != support size");
  if (is_equality()) {
    if (target().size() != features.cols)
      throw std::invalid_argument("problem: target length != feature cols");
    for (double v : target())
      if (!std::isfinite(v))
        throw std::invalid_argument("problem: non-finite target");
  } else {
    const auto& b = box();
    if (b.lower.size() != features.cols || b.upper.size() != features.cols)
      throw std::invalid_argument("problem: box length != feature cols");
    for (std::size_t k = 0; k < b.lower.size(); ++k)
      if (!(b.lower[k] <= b.upper[k]))
        throw std::invalid_argument("problem: empty box");
  }
}

double log_partition(const MomentProblem& p, std::span<const double> y) {
  auto u = adjoint_features(p.features, y);
  double total = 0.0;
  for (std::size_t z = 0; z < u.size(); ++z) {
    double v = p.family.value(z, u[z]);
    if (!std::isfinite(v)) return kInf;
    total += v * p.reference.weights[z];
  }
  return total;
}

double min_over_constraint(const MomentProblem& p, std::span<const double> y,
                           double atol) {
  if (p.is_equality()) {
    const auto& x = p.target();
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += y[k] * x[k];
    return s;
  }
  const auto& b = p.box();
  double s = 0.0;
  for (std::size_t k = 0; k < b.lower.size(); ++k) {
    double bound = y[k] >= 0.0 ? b.lower[k] : b.upper[k];
    if (std::isinf(bound)) {
      if (std::fabs(y[k]) <= atol) continue;  // inactive coordinate
      return -kInf;
    }
    s += y[k] * bound;
  }
  return s;
}

double young_residual(const MomentProblem& p, const DiscreteMeasure& q,
                      std::span<const double> y) {
  double i_val = entropy_value(p.family, p.reference, q);
  double gamma = log_partition(p, y);
  auto x = push_moments(p.features, q);
  double pairing = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) pairing += y[k] * x[k];
  return std::fabs(i_val + gamma - pairing);
}

KktResiduals kkt_report(const MomentProblem& p, const DiscreteMeasure& q,
                        std::span<const double> y) {
  KktResiduals res;
  auto x = push_moments(p.features, q);

  // (a) distance of T Q to C in the sup norm
  double dist = 0.0;
  if (p.is_equality()) {
    const auto& t = p.target();
    for (std::size_t k = 0; k < x.size(); ++k)
      dist = std::max(dist, std::fabs(x[k] - t[k]));
  } else {
    const auto& b = p.box();
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] < b.lower[k]) dist = std::max(dist, b.lower[k] - x[k]);
      if (x[k] > b.upper[k]) dist = std::max(dist, x[k] - b.upper[k]);
    }
  }
  res.constraint_residual = dist;

  // (b) <y, T Q> - min_{x in C} <y, x>
  double pairing = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) pairing += y[k] * x[k];
  double mn = min_over_constraint(p, y);
  res.support_condition_residual =
      std::isinf(mn) ? kInf : std::max(pairing - mn, 0.0);

  // (c) max_z |Q_z - gamma'_z(<y, theta(z)>) R_z|
  auto u = adjoint_features(p.features, y);
  double rep = 0.0;
  for (std::size_t z = 0; z < u.size(); ++z) {
    double tilt = p.family.derivative(z, u[z]) * p.reference.weights[z];
    rep = std::max(rep, std::fabs(q.weights[z] - tilt));
  }
  res.representation_residual = rep;
  return res;
}

bool saddle_check(double primal_value, double dual_value, double tol) {
  return std::fabs(primal_value - dual_value) <=
         tol * (1.0 + std::fabs(primal_value));
}

}  // namespace saddlepoint
