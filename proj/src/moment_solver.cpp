#include "saddlepoint/moment_solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "saddlepoint/oracles.hpp"

namespace saddlepoint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double linf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// column index of a row of ones in T, or -1
int mass_feature_index(const FeatureMap& t) {
  for (std::size_t k = 0; k < t.cols; ++k) {
    bool ones = true;
    for (std::size_t z = 0; z < t.rows && ones; ++z)
      ones = (t.at(z, k) == 1.0);
    if (ones) return static_cast<int>(k);
  }
  return -1;
}

// qualification_check needs densities ranging over [0, inf)
bool nonnegative_density_family(const IntegrandFamily& fam) {
  return fam.tag() == Family::RelativeEntropy || fam.tag() == Family::Burg;
}
}  // namespace

DualEval dual_objective_at(const MomentProblem& p, const MomentVector& x,
                           std::span<const double> y) {
  const std::size_t k = p.features.cols;
  const std::size_t n = p.features.rows;
  DualEval ev;
  ev.gradient.assign(k, 0.0);
  ev.hessian.assign(k * k, 0.0);

  auto u = adjoint_features(p.features, y);
  double gamma_sum = 0.0;
  std::vector<double> tilt(n), curv(n);
  for (std::size_t z = 0; z < n; ++z) {
    double g = p.family.value(z, u[z]);
    if (!std::isfinite(g)) {
      ev.feasible = false;
      ev.value = -kInf;
      return ev;
    }
    gamma_sum += g * p.reference.weights[z];
    tilt[z] = p.family.derivative(z, u[z]) * p.reference.weights[z];
    curv[z] = p.family.second_derivative(z, u[z]) * p.reference.weights[z];
    if (!std::isfinite(tilt[z]) || !std::isfinite(curv[z])) {
      ev.feasible = false;
      ev.value = -kInf;
      return ev;
    }
  }
  ev.feasible = true;
  ev.value = dot(y, x) - gamma_sum;
  for (std::size_t j = 0; j < k; ++j) {
    double g = x[j];
    for (std::size_t z = 0; z < n; ++z) g -= p.features.at(z, j) * tilt[z];
    ev.gradient[j] = g;
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double h = 0.0;
      for (std::size_t z = 0; z < n; ++z)
        h -= p.features.at(z, a) * p.features.at(z, b) * curv[z];
      ev.hessian[a * k + b] = h;
      ev.hessian[b * k + a] = h;
    }
  return ev;
}

DualEval dual_objective(const MomentProblem& p, std::span<const double> y) {
  if (!p.is_equality())
    throw std::invalid_argument("dual_objective: equality problem required");
  return dual_objective_at(p, p.target(), y);
}

namespace {

EqualitySolveResult solve_equality_at(const MomentProblem& p,
                                      const MomentVector& x,
                                      const std::vector<double>& y0,
                                      const SolverOptions& opts,
                                      bool run_qualification) {
  const std::size_t k = p.features.cols;
  EqualitySolveResult res;
  res.cert.tol = opts.tol;

  if (run_qualification) {
    auto qr = qualification_check(p, x);
    res.cert.qualification = qr.status;
    if (qr.status == Qualification::Outside) {
      res.diagnostic = "primal infeasible or qualification fails";
    }
  }

  std::vector<double> y = y0;
  DualEval ev = dual_objective_at(p, x, y);
  if (!ev.feasible) {
    y.assign(k, 0.0);
    ev = dual_objective_at(p, x, y);  // y = 0 is always feasible
  }

  bool converged = false, diverged = false;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (linf(ev.gradient) <= opts.tol) {
      converged = true;
      break;
    }
    // Newton direction: (M + mu I) s = g with M = -H positive semidefinite
    Eigen::Map<const Eigen::MatrixXd> hmap(ev.hessian.data(), k, k);
    Eigen::MatrixXd m = -hmap;
    Eigen::Map<const Eigen::VectorXd> g(ev.gradient.data(), k);
    double trace_scale = std::max(m.trace() / static_cast<double>(k), 1e-12);
    double mu = 1e-10 * trace_scale;
    Eigen::VectorXd s;
    bool have_dir = false;
    for (int tries = 0; tries < 60 && !have_dir; ++tries) {
      Eigen::LLT<Eigen::MatrixXd> llt(
          m + mu * Eigen::MatrixXd::Identity(k, k));
      if (llt.info() == Eigen::Success) {
        s = llt.solve(g);
        if (s.allFinite() && s.dot(g) > 0.0) have_dir = true;
      }
      if (!have_dir) mu *= 10.0;
    }
    if (!have_dir) break;

    double slope = s.dot(g);
    double alpha = 1.0;
    std::vector<double> trial(k);
    DualEval tev;
    bool accepted = false;
    // Near the optimum the Armijo increase falls below one ulp of the
    // objective; then any non-decreasing step (at FP resolution) is accepted
    // so the final Newton step can still be taken.
    const double fp_floor = 1e-15 * (1.0 + std::fabs(ev.value));
    while (alpha >= 1e-18) {
      for (std::size_t j = 0; j < k; ++j) trial[j] = y[j] + alpha * s[j];
      tev = dual_objective_at(p, x, trial);
      if (tev.feasible &&
          (tev.value >= ev.value + 1e-4 * alpha * slope ||
           (1e-4 * alpha * slope <= fp_floor &&
            tev.value >= ev.value - fp_floor))) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // stalled
    y = trial;
    ev = tev;
    if (linf(y) > 1e8 && linf(ev.gradient) > 1e-6) {
      diverged = true;
      break;
    }
  }

  res.dual.y = y;
  res.dual.dual_value = ev.value;
  res.dual.gradient = ev.gradient;
  res.dual.iterations = it;
  res.dual.converged = converged;
  if (diverged && res.diagnostic.empty())
    res.diagnostic = "primal infeasible or qualification fails";

  // primal recovery by the tilt formula
  auto u = adjoint_features(p.features, y);
  std::vector<double> w(u.size());
  for (std::size_t z = 0; z < u.size(); ++z)
    w[z] = p.family.derivative(z, u[z]) * p.reference.weights[z];
  res.primal.q = DiscreteMeasure(p.reference.support, std::move(w));
  res.primal.value = entropy_value(p.family, p.reference, res.primal.q);
  res.primal.moments = push_moments(p.features, res.primal.q);

  MomentProblem eq = p;
  eq.constraint = EqualityConstraint{x};
  res.cert.primal_value = res.primal.value;
  res.cert.dual_value = ev.value;
  res.cert.gap = res.cert.primal_value - res.cert.dual_value;
  res.cert.young_residual = young_residual(eq, res.primal.q, y);
  res.cert.kkt = kkt_report(eq, res.primal.q, y);
  res.cert.converged = converged;
  return res;
}

}  // namespace

EqualitySolveResult solve_equality(const MomentProblem& p,
                                   const SolverOptions& opts) {
  p.validate();
  if (!p.is_equality())
    throw std::invalid_argument("solve_equality: equality constraint required");
  bool can_qualify = nonnegative_density_family(p.family) &&
                     mass_feature_index(p.features) >= 0;
  return solve_equality_at(p, p.target(), std::vector<double>(p.features.cols, 0.0),
                           opts, can_qualify);
}

BoxSolveResult solve_box(const MomentProblem& p, const SolverOptions& opts) {
  p.validate();
  if (p.is_equality())
    throw std::invalid_argument("solve_box: box constraint required");
  const auto& b = p.box();
  const std::size_t k = p.features.cols;

  bool degenerate = true;
  for (std::size_t j = 0; j < k && degenerate; ++j)
    degenerate = (b.lower[j] == b.upper[j]);
  if (degenerate) {
    MomentProblem eq = p;
    eq.constraint = EqualityConstraint{b.lower};
    auto er = solve_equality(eq, opts);
    BoxSolveResult res;
    res.x_opt = b.lower;
    res.dual = er.dual;
    res.primal = er.primal;
    res.cert = er.cert;
    res.diagnostic = er.diagnostic;
    return res;
  }

  auto clamp_box = [&](const MomentVector& v) {
    MomentVector out(k);
    for (std::size_t j = 0; j < k; ++j)
      out[j] = std::min(std::max(v[j], b.lower[j]), b.upper[j]);
    return out;
  };

  // start from the clamped moments of the unconstrained minimizer mR
  std::vector<double> w0(p.reference.size());
  for (std::size_t z = 0; z < w0.size(); ++z)
    w0[z] = p.family.minimizer(z) * p.reference.weights[z];
  DiscreteMeasure mr(p.reference.support, std::move(w0));
  MomentVector x = clamp_box(push_moments(p.features, mr));

  std::vector<double> y(k, 0.0);
  auto inner = solve_equality_at(p, x, y, opts, false);
  if (!inner.dual.converged) {
    // fall back to the box midpoint, keeping infinite coordinates
    MomentVector mid = x;
    for (std::size_t j = 0; j < k; ++j)
      if (std::isfinite(b.lower[j]) && std::isfinite(b.upper[j]))
        mid[j] = 0.5 * (b.lower[j] + b.upper[j]);
    auto retry = solve_equality_at(p, mid, std::vector<double>(k, 0.0), opts,
                                   false);
    if (retry.dual.converged) {
      x = mid;
      inner = retry;
    }
  }

  BoxSolveResult res;
  res.cert.tol = opts.tol;
  if (!inner.dual.converged) {
    res.x_opt = x;
    res.dual = inner.dual;
    res.primal = inner.primal;
    res.cert = inner.cert;
    res.diagnostic = inner.diagnostic.empty()
                         ? "inner equality solve failed at the starting point"
                         : inner.diagnostic;
    return res;
  }

  double fx = inner.dual.dual_value;  // Gamma*(x)
  std::vector<double> grad = inner.dual.y;
  double step = 1.0;
  MomentVector x_prev;
  std::vector<double> grad_prev;
  bool outer_converged = false;
  int outer = 0;
  const int max_outer = 20000;
  for (; outer < max_outer; ++outer) {
    MomentVector pg(k);
    {
      MomentVector probe(k);
      for (std::size_t j = 0; j < k; ++j) probe[j] = x[j] - grad[j];
      probe = clamp_box(probe);
      for (std::size_t j = 0; j < k; ++j) pg[j] = x[j] - probe[j];
    }
    if (linf(pg) <= opts.tol) {
      outer_converged = true;
      break;
    }

    // Barzilai-Borwein step seed, then Armijo backtracking on Gamma* values
    if (!x_prev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        double dx = x[j] - x_prev[j];
        ss += dx * dx;
        sy += dx * (grad[j] - grad_prev[j]);
      }
      if (sy > 0.0 && std::isfinite(ss / sy))
        step = std::min(std::max(ss / sy, 1e-12), 1e12);
    }

    bool accepted = false;
    double trial_step = step;
    MomentVector xt(k);
    EqualitySolveResult inner_t;
    const double fp_floor = 1e-15 * (1.0 + std::fabs(fx));
    while (trial_step >= 1e-18) {
      for (std::size_t j = 0; j < k; ++j) xt[j] = x[j] - trial_step * grad[j];
      xt = clamp_box(xt);
      inner_t = solve_equality_at(p, xt, inner.dual.y, opts, false);
      if (inner_t.dual.converged) {
        double decrease = 0.0;
        for (std::size_t j = 0; j < k; ++j)
          decrease += grad[j] * (x[j] - xt[j]);
        if (inner_t.dual.dual_value <= fx - 1e-4 * decrease) {
          accepted = true;
          break;
        }
      }
      trial_step *= 0.5;
    }
    bool moved = false;
    if (accepted)
      for (std::size_t j = 0; j < k && !moved; ++j) moved = (xt[j] != x[j]);
    if (!moved) {
      // The iterate can no longer change at double precision: x is
      // stationary to the accuracy the inner solves can deliver, which is
      // bounded below by the square root of the value's FP resolution.
      outer_converged = linf(pg) <= std::sqrt(fp_floor);
      break;
    }

    x_prev = x;
    grad_prev = grad;
    x = xt;
    inner = inner_t;
    fx = inner.dual.dual_value;
    grad = inner.dual.y;
  }

  res.x_opt = x;
  res.dual = inner.dual;
  res.dual.converged = outer_converged && inner.dual.converged;
  res.primal = inner.primal;

  bool can_qualify = nonnegative_density_family(p.family) &&
                     mass_feature_index(p.features) >= 0;
  res.cert.qualification = can_qualify ? qualification_check(p, x).status
                                       : Qualification::Unavailable;
  res.cert.primal_value = res.primal.value;
  double gamma = log_partition(p, res.dual.y);
  double mn = min_over_constraint(p, res.dual.y, 1e-9);
  res.cert.dual_value = std::isinf(mn) ? -kInf : mn - gamma;
  res.cert.gap = res.cert.primal_value - res.cert.dual_value;
  res.cert.young_residual = young_residual(p, res.primal.q, res.dual.y);
  res.cert.kkt = kkt_report(p, res.primal.q, res.dual.y);
  res.cert.converged = res.dual.converged;
  if (!res.dual.converged && res.diagnostic.empty())
    res.diagnostic = "outer projected-gradient loop did not converge";
  return res;
}

QualificationReport qualification_check(const MomentProblem& p,
                                        const MomentVector& x) {
  QualificationReport rep;
  if (!nonnegative_density_family(p.family) ||
      mass_feature_index(p.features) < 0) {
    rep.status = Qualification::Unavailable;
    return rep;
  }
  const std::size_t n = p.features.rows, k = p.features.cols;
  // max t  s.t.  sum_z q_z theta(z) = x,  q_z >= t
  // substitute q_z = w_z + t with w_z >= 0 and t free (split t = tp - tm)
  LinearProgram lp;
  lp.sense = LpSense::Maximize;
  lp.c.assign(n + 2, 0.0);
  lp.c[n] = 1.0;
  lp.c[n + 1] = -1.0;
  lp.free_var.assign(n + 2, false);
  for (std::size_t row = 0; row < k; ++row) {
    std::vector<double> a(n + 2, 0.0);
    double colsum = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      a[z] = p.features.at(z, row);
      colsum += a[z];
    }
    a[n] = colsum;
    a[n + 1] = -colsum;
    lp.a.push_back(std::move(a));
    lp.b.push_back(x[row]);
    lp.rel.push_back(LpRelation::Eq);
  }
  auto sol = simplex_solve(lp);
  const double eps = 1e-9;
  if (sol.status != LpStatus::Optimal) {
    rep.status = Qualification::Outside;
    return rep;
  }
  double t = sol.value;
  rep.margin = t;
  if (t > eps) {
    rep.status = Qualification::Interior;
    rep.witness.resize(n);
    for (std::size_t z = 0; z < n; ++z) rep.witness[z] = sol.x[z] + t;
  } else if (t >= -eps) {
    rep.status = Qualification::Boundary;
  } else {
    rep.status = Qualification::Outside;
  }
  return rep;
}

}  // namespace saddlepoint
