#pragma once

#include <string>

#include "saddlepoint/certificates.hpp"

namespace saddlepoint {

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

struct DualState {
  std::vector<double> y;
  double dual_value = 0;
  std::vector<double> gradient;
  int iterations = 0;
  bool converged = false;
};

struct PrimalSolution {
  DiscreteMeasure q;
  double value = 0;  // I(Q)
  MomentVector moments;
};

/// Concave dual objective at y for the equality target x: value, gradient
/// and (negative semidefinite) Hessian. `feasible` is false when some
/// <y, theta(z)> leaves dom gamma_z; the line search uses this flag.
struct DualEval {
  double value = 0;
  std::vector<double> gradient;
  std::vector<double> hessian;  // K x K row-major
  bool feasible = false;
};

DualEval dual_objective(const MomentProblem& p, std::span<const double> y);
DualEval dual_objective_at(const MomentProblem& p, const MomentVector& x,
                           std::span<const double> y);

struct EqualitySolveResult {
  DualState dual;
  PrimalSolution primal;
  Certificate cert;
  std::string diagnostic;  // non-empty on infeasibility / qualification failure
};

/// Damped Newton ascent on the dual with Armijo backtracking; primal
/// recovered by the tilt formula Q_z = gamma'_z(<y, theta(z)>) R_z.
EqualitySolveResult solve_equality(const MomentProblem& p,
                                   const SolverOptions& opts = {});

struct BoxSolveResult {
  MomentVector x_opt;
  DualState dual;
  PrimalSolution primal;
  Certificate cert;
  std::string diagnostic;
};

/// Outer projected-gradient descent on x -> Gamma*(x) over the box, with
/// inner equality solves supplying values and gradients (the envelope
/// gradient is the inner dual optimizer).
BoxSolveResult solve_box(const MomentProblem& p, const SolverOptions& opts = {});

struct QualificationReport {
  Qualification status = Qualification::Unavailable;
  std::vector<double> witness;  // primal weights when Interior
  double margin = 0;            // optimal t of the interiority LP
};

/// Relative-interior membership of x in the achievable moment set, decided
/// by the LP max t s.t. sum_z q_z theta(z) = x, q_z >= t. Requires a
/// nonnegative-density family and a mass feature (a row of ones in T).
QualificationReport qualification_check(const MomentProblem& p,
                                        const MomentVector& x);

}  // namespace saddlepoint
