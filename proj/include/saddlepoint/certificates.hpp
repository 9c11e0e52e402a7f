#pragma once

#include <span>

#include "saddlepoint/problem.hpp"

namespace saddlepoint {

enum class Qualification { Interior, Boundary, Outside, Unavailable };

struct KktResiduals {
  double constraint_residual = 0;      // distance of T Q to the constraint set
  double support_condition_residual = 0;  // <y, x_hat> - min_{x in C} <y, x>
  double representation_residual = 0;  // max_z |Q_z - gamma'_z(<y,theta>) R_z|
};

/// Machine-checkable optimality record attached to every solve. Residuals
/// mix absolute and relative normalization; the tolerance they were checked
/// against is stored alongside.
struct Certificate {
  double primal_value = 0;
  double dual_value = 0;
  double gap = 0;
  double young_residual = 0;
  KktResiduals kkt;
  Qualification qualification = Qualification::Unavailable;
  bool converged = false;
  double tol = 0;
};

/// |I(Q) + Gamma(y) - <y, T Q>|, the equality defect of Young's identity.
double young_residual(const MomentProblem& p, const DiscreteMeasure& q,
                      std::span<const double> y);

/// The three first-order conditions as residuals, with the support condition
/// in closed form for boxes.
KktResiduals kkt_report(const MomentProblem& p, const DiscreteMeasure& q,
                        std::span<const double> y);

/// Gap test |primal - dual| <= tol * (1 + |primal|).
bool saddle_check(double primal_value, double dual_value, double tol);

/// Sum_z gamma_z(<y, theta(z)>) R_z; +inf when a point leaves dom gamma.
double log_partition(const MomentProblem& p, std::span<const double> y);

/// Closed-form min_{x in C} <y, x> for the problem's constraint set.
/// Entries with an infinite relevant bound contribute -inf unless the
/// matching dual coordinate is zero to within `atol`.
double min_over_constraint(const MomentProblem& p, std::span<const double> y,
                           double atol = 1e-9);

}  // namespace saddlepoint
