#pragma once

#include <span>
#include <vector>

#include "saddlepoint/certificates.hpp"

namespace saddlepoint {

/// Discrete Monge-Kantorovich instance with probability marginals and a
/// finite nonnegative cost matrix.
struct TransportProblem {
  std::vector<double> mu;                  // length m
  std::vector<double> nu;                  // length n
  std::vector<std::vector<double>> cost;   // m x n

  void validate() const;
  std::size_t m() const { return mu.size(); }
  std::size_t n() const { return nu.size(); }
};

struct TransportPlan {
  std::vector<std::vector<double>> pi;  // m x n, nonnegative
};

/// Kantorovich potentials, normalized f[0] = 0.
struct Potentials {
  std::vector<double> f;
  std::vector<double> g;
};

struct TransportSolveResult {
  TransportPlan plan;
  Potentials pot;
  Certificate cert;
};

/// Exact optimal plan by successive-shortest-path min-cost flow on the
/// bipartite transportation graph; dual potentials read off the node
/// potentials and tightened by one c-transform round.
TransportSolveResult solve_ot(const TransportProblem& p);

/// f_i = min_j (c_ij - g_j): the largest f completing a dual-feasible pair.
std::vector<double> c_transform_rows(const TransportProblem& p,
                                     std::span<const double> g);
/// g_j = min_i (c_ij - f_i).
std::vector<double> c_transform_cols(const TransportProblem& p,
                                     std::span<const double> f);

struct SlacknessViolation {
  std::size_t i = 0, j = 0;
  double mass = 0;   // pi_ij
  double slack = 0;  // c_ij - f_i - g_j
};

/// Cells carrying mass where the potentials do not saturate the cost;
/// empty report certifies the pair optimal.
std::vector<SlacknessViolation> slackness_check(const TransportProblem& p,
                                                const TransportPlan& plan,
                                                const Potentials& pot,
                                                double tol = 1e-9);

}  // namespace saddlepoint
