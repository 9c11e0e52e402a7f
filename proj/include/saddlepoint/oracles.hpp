#pragma once

#include "saddlepoint/problem.hpp"
#include "saddlepoint/transport.hpp"

namespace saddlepoint {

struct GridOracleResult {
  bool feasible = false;
  double value = 0;
  double error_bound = 0;  // self-reported bound on |value - true optimum|
  double lipschitz = 0;    // local Lipschitz estimate it derives from
  std::vector<double> best;
};

/// Brute-force minimization of the entropy over the weight grid h * Z,
/// keeping points whose moments land within `slack` of the target in the
/// sup norm. Support size <= 4. Independent of the solver path.
GridOracleResult entropy_oracle_grid(const MomentProblem& p, double grid_step,
                                     double slack);

/// Exact transport optimum by enumerating the basic feasible solutions of
/// the transportation polytope (spanning trees of the bipartite graph).
/// Requires m, n <= 4.
double ot_oracle_vertices(const TransportProblem& p);

enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class LpSense { Minimize, Maximize };
enum class LpRelation { LessEq, Eq, GreaterEq };

/// Small dense LP in row form: optimize c.x subject to a_i . x (rel_i) b_i,
/// with x_j >= 0 unless marked free.
struct LinearProgram {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<LpRelation> rel;
  std::vector<double> c;
  LpSense sense = LpSense::Minimize;
  std::vector<bool> free_var;  // empty = all nonnegative
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0;
  std::vector<double> x;
};

/// Two-phase dense primal simplex with Bland's rule; dimensions <= 64.
LpResult simplex_solve(const LinearProgram& lp);

}  // namespace saddlepoint
