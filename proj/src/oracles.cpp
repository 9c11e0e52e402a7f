#include "saddlepoint/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace saddlepoint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEps = 1e-11;

// Dense tableau simplex on the standard form min c.x, A x = b, x >= 0,
// b >= 0, starting from the given basis. Bland's rule. Returns false on
// unboundedness.
bool run_simplex(std::vector<std::vector<double>>& tab, std::vector<double>& rhs,
                 std::vector<double>& cost, std::vector<int>& basis,
                 double& objective, std::size_t ncols) {
  const std::size_t nrows = tab.size();
  std::vector<double> reduced(ncols);
  for (int iter = 0; iter < 20000; ++iter) {
    // reduced costs via basis multipliers (recomputed; sizes are tiny)
    for (std::size_t j = 0; j < ncols; ++j) {
      double r = cost[j];
      for (std::size_t i = 0; i < nrows; ++i)
        r -= cost[static_cast<std::size_t>(basis[i])] * tab[i][j];
      reduced[j] = r;
    }
    int enter = -1;
    for (std::size_t j = 0; j < ncols; ++j)
      if (reduced[j] < -kPivotEps) { enter = static_cast<int>(j); break; }
    if (enter < 0) break;  // optimal

    int leave = -1;
    double best_ratio = kInf;
    for (std::size_t i = 0; i < nrows; ++i) {
      if (tab[i][static_cast<std::size_t>(enter)] > kPivotEps) {
        double ratio = rhs[i] / tab[i][static_cast<std::size_t>(enter)];
        if (ratio < best_ratio - kPivotEps ||
            (ratio < best_ratio + kPivotEps && leave >= 0 &&
             basis[i] < basis[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = static_cast<int>(i);
        }
      }
    }
    if (leave < 0) return false;  // unbounded

    // pivot
    std::size_t li = static_cast<std::size_t>(leave);
    std::size_t ej = static_cast<std::size_t>(enter);
    double piv = tab[li][ej];
    for (std::size_t j = 0; j < ncols; ++j) tab[li][j] /= piv;
    rhs[li] /= piv;
    for (std::size_t i = 0; i < nrows; ++i) {
      if (i == li) continue;
      double f = tab[i][ej];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < ncols; ++j) tab[i][j] -= f * tab[li][j];
      rhs[i] -= f * rhs[li];
      if (rhs[i] < 0.0 && rhs[i] > -1e-12) rhs[i] = 0.0;
    }
    basis[li] = enter;
  }
  objective = 0.0;
  for (std::size_t i = 0; i < nrows; ++i)
    objective += cost[static_cast<std::size_t>(basis[i])] * rhs[i];
  return true;
}
}  // namespace

LpResult simplex_solve(const LinearProgram& lp) {
  const std::size_t nrows = lp.a.size();
  const std::size_t nvars = lp.c.size();
  if (nvars > 64 || nrows > 64)
    throw std::invalid_argument("simplex_solve: dimensions exceed 64");
  for (const auto& row : lp.a)
    if (row.size() != nvars)
      throw std::invalid_argument("simplex_solve: ragged constraint matrix");

  // column layout: each variable contributes one column (nonnegative) or a
  // +/- pair (free); then one slack/surplus per inequality row.
  std::vector<std::size_t> pos_col(nvars), neg_col(nvars, SIZE_MAX);
  std::size_t ncols = 0;
  for (std::size_t j = 0; j < nvars; ++j) {
    pos_col[j] = ncols++;
    if (j < lp.free_var.size() && lp.free_var[j]) neg_col[j] = ncols++;
  }
  std::size_t slack_base = ncols;
  for (auto r : lp.rel)
    if (r != LpRelation::Eq) ++ncols;

  std::vector<std::vector<double>> tab(nrows, std::vector<double>(ncols, 0.0));
  std::vector<double> rhs(nrows);
  std::size_t slack = slack_base;
  for (std::size_t i = 0; i < nrows; ++i) {
    double sign = 1.0;
    if (lp.b[i] < 0.0) sign = -1.0;  // normalize b >= 0
    rhs[i] = sign * lp.b[i];
    for (std::size_t j = 0; j < nvars; ++j) {
      tab[i][pos_col[j]] = sign * lp.a[i][j];
      if (neg_col[j] != SIZE_MAX) tab[i][neg_col[j]] = -sign * lp.a[i][j];
    }
    if (lp.rel[i] != LpRelation::Eq) {
      double s = (lp.rel[i] == LpRelation::LessEq) ? 1.0 : -1.0;
      tab[i][slack++] = sign * s;
    }
  }

  // phase 1: artificial variables
  std::size_t total = ncols + nrows;
  for (auto& row : tab) row.resize(total, 0.0);
  std::vector<int> basis(nrows);
  std::vector<double> cost1(total, 0.0);
  for (std::size_t i = 0; i < nrows; ++i) {
    tab[i][ncols + i] = 1.0;
    basis[i] = static_cast<int>(ncols + i);
    cost1[ncols + i] = 1.0;
  }
  double obj1 = 0.0;
  if (!run_simplex(tab, rhs, cost1, basis, obj1, total))
    return {LpStatus::Infeasible, 0.0, {}};
  if (obj1 > 1e-8) return {LpStatus::Infeasible, 0.0, {}};

  // drive any artificial still in the basis out, dropping redundant rows
  for (std::size_t i = 0; i < tab.size();) {
    if (basis[i] < static_cast<int>(ncols)) { ++i; continue; }
    int repl = -1;
    for (std::size_t j = 0; j < ncols; ++j)
      if (std::fabs(tab[i][j]) > kPivotEps) { repl = static_cast<int>(j); break; }
    if (repl < 0) {  // row is zero in all real columns: redundant
      tab.erase(tab.begin() + static_cast<long>(i));
      rhs.erase(rhs.begin() + static_cast<long>(i));
      basis.erase(basis.begin() + static_cast<long>(i));
      continue;
    }
    double piv = tab[i][static_cast<std::size_t>(repl)];
    for (std::size_t j = 0; j < total; ++j) tab[i][j] /= piv;
    rhs[i] /= piv;
    for (std::size_t r = 0; r < tab.size(); ++r) {
      if (r == i) continue;
      double f = tab[r][static_cast<std::size_t>(repl)];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < total; ++j) tab[r][j] -= f * tab[i][j];
      rhs[r] -= f * rhs[i];
    }
    basis[i] = repl;
    ++i;
  }
  for (double& v : rhs)
    if (v < 0.0 && v > -1e-9) v = 0.0;

  // phase 2: original objective over the real columns only
  std::vector<double> cost2(ncols, 0.0);
  for (std::size_t j = 0; j < nvars; ++j) {
    double cj = (lp.sense == LpSense::Minimize) ? lp.c[j] : -lp.c[j];
    cost2[pos_col[j]] = cj;
    if (neg_col[j] != SIZE_MAX) cost2[neg_col[j]] = -cj;
  }
  double obj2 = 0.0;
  if (!run_simplex(tab, rhs, cost2, basis, obj2, ncols))
    return {LpStatus::Unbounded, 0.0, {}};

  std::vector<double> xstd(total, 0.0);
  for (std::size_t i = 0; i < tab.size(); ++i)
    xstd[static_cast<std::size_t>(basis[i])] = rhs[i];
  LpResult res;
  res.status = LpStatus::Optimal;
  res.x.resize(nvars);
  for (std::size_t j = 0; j < nvars; ++j) {
    res.x[j] = xstd[pos_col[j]];
    if (neg_col[j] != SIZE_MAX) res.x[j] -= xstd[neg_col[j]];
  }
  double v = 0.0;
  for (std::size_t j = 0; j < nvars; ++j) v += lp.c[j] * res.x[j];
  res.value = v;
  return res;
}

GridOracleResult entropy_oracle_grid(const MomentProblem& p, double grid_step,
                                     double slack) {
  p.validate();
  if (!p.is_equality())
    throw std::invalid_argument("entropy_oracle_grid: equality problem required");
  const std::size_t n = p.reference.size(), k = p.features.cols;
  if (n > 4)
    throw std::invalid_argument("entropy_oracle_grid: support size <= 4 required");
  const auto& x = p.target();
  const double h = grid_step;

  // mass cap from a row of ones when present, generic fallback otherwise
  double cap = 10.0;
  for (std::size_t col = 0; col < k; ++col) {
    bool ones = true;
    for (std::size_t z = 0; z < n && ones; ++z)
      ones = (p.features.at(z, col) == 1.0);
    if (ones) { cap = x[col] + slack; break; }
  }
  const long steps = std::lround(std::floor(cap / h));

  // suffix bounds of the remaining moment contributions
  std::vector<double> min_rem((n + 1) * k, 0.0), max_rem((n + 1) * k, 0.0);
  for (std::size_t z = n; z-- > 0;)
    for (std::size_t col = 0; col < k; ++col) {
      double lo = std::min(0.0, p.features.at(z, col) * cap);
      double hi = std::max(0.0, p.features.at(z, col) * cap);
      min_rem[z * k + col] = min_rem[(z + 1) * k + col] + lo;
      max_rem[z * k + col] = max_rem[(z + 1) * k + col] + hi;
    }

  GridOracleResult res;
  res.value = kInf;
  std::vector<double> q(n, 0.0), partial(k, 0.0);

  auto recurse = [&](auto&& self, std::size_t z, double ent) -> void {
    if (ent >= res.value) return;  // gamma* >= 0: entropy only grows
    if (z == n) {
      for (std::size_t col = 0; col < k; ++col)
        if (std::fabs(partial[col] - x[col]) > slack) return;
      res.value = ent;
      res.feasible = true;
      res.best = q;
      return;
    }
    for (std::size_t col = 0; col < k; ++col) {
      if (partial[col] + max_rem[z * k + col] < x[col] - slack) return;
      if (partial[col] + min_rem[z * k + col] > x[col] + slack) return;
    }
    for (long s = 0; s <= steps; ++s) {
      double qz = s * h;
      double term = p.family.conjugate(z, qz / p.reference.weights[z]) *
                    p.reference.weights[z];
      if (!std::isfinite(term)) continue;
      q[z] = qz;
      for (std::size_t col = 0; col < k; ++col)
        partial[col] += p.features.at(z, col) * qz;
      self(self, z + 1, ent + term);
      for (std::size_t col = 0; col < k; ++col)
        partial[col] -= p.features.at(z, col) * qz;
    }
    q[z] = 0.0;
  };
  recurse(recurse, 0, 0.0);

  if (!res.feasible) return res;

  // local Lipschitz estimate at the best grid point via one-sided
  // differences of the conjugate
  double lmax = 0.0;
  for (std::size_t z = 0; z < n; ++z) {
    double t = res.best[z] / p.reference.weights[z];
    double dt = std::max(h / p.reference.weights[z], 1e-6);
    double f0 = p.family.conjugate(z, t), fp = p.family.conjugate(z, t + dt);
    double fm = p.family.conjugate(z, std::max(t - dt, 0.0));
    double d = 0.0;
    if (std::isfinite(fp)) d = std::max(d, std::fabs(fp - f0) / dt);
    if (std::isfinite(fm) && t - dt >= 0.0)
      d = std::max(d, std::fabs(f0 - fm) / dt);
    lmax = std::max(lmax, d);
  }
  double feat_max = 0.0;
  for (double v : p.features.data) feat_max = std::max(feat_max, std::fabs(v));
  res.lipschitz =
      2.0 * static_cast<double>(n) * std::max(1.0, lmax) *
      std::max(1.0, feat_max) * (1.0 + slack / h);
  res.error_bound = res.lipschitz * h;
  return res;
}

double ot_oracle_vertices(const TransportProblem& p) {
  p.validate();
  const std::size_t m = p.m(), n = p.n();
  if (m > 4 || n > 4)
    throw std::invalid_argument("ot_oracle_vertices: m,n <= 4 required");
  const std::size_t edges = m * n;
  const std::size_t tree_edges = m + n - 1;

  double best = kInf;
  std::vector<int> deg(m + n), parent(m + n);
  std::vector<std::pair<int, int>> elist;
  std::vector<double> bal(m + n), flow(edges);

  for (unsigned mask = 0; mask < (1u << edges); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != tree_edges)
      continue;
    elist.clear();
    std::fill(deg.begin(), deg.end(), 0);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    bool acyclic = true;
    for (std::size_t e = 0; e < edges && acyclic; ++e) {
      if (!(mask & (1u << e))) continue;
      int i = static_cast<int>(e / n), j = static_cast<int>(m + e % n);
      int ri = find(i), rj = find(j);
      if (ri == rj) { acyclic = false; break; }
      parent[ri] = rj;
      elist.push_back({i, j});
      ++deg[i];
      ++deg[j];
    }
    if (!acyclic || elist.size() != tree_edges) continue;

    // unique tree flow by leaf stripping
    for (std::size_t i = 0; i < m; ++i) bal[i] = p.mu[i];
    for (std::size_t j = 0; j < n; ++j) bal[m + j] = -p.nu[j];
    std::vector<std::pair<int, int>> rem = elist;
    std::vector<int> d(deg);
    bool ok = true;
    double cost = 0.0;
    std::vector<bool> used(rem.size(), false);
    for (std::size_t round = 0; round < tree_edges; ++round) {
      int leaf = -1;
      std::size_t eidx = 0;
      for (std::size_t e = 0; e < rem.size() && leaf < 0; ++e) {
        if (used[e]) continue;
        if (d[rem[e].first] == 1) { leaf = rem[e].first; eidx = e; }
        else if (d[rem[e].second] == 1) { leaf = rem[e].second; eidx = e; }
      }
      if (leaf < 0) { ok = false; break; }
      auto [i, j] = rem[eidx];
      double f = (leaf == i) ? bal[i] : -bal[j];
      if (f < -1e-12) { ok = false; break; }
      bal[i] -= f;
      bal[j] += f;
      cost += f * p.cost[static_cast<std::size_t>(i)]
                       [static_cast<std::size_t>(j) - m];
      used[eidx] = true;
      --d[i];
      --d[j];
    }
    if (ok) best = std::min(best, cost);
  }
  if (!std::isfinite(best))
    throw std::runtime_error("ot_oracle_vertices: no feasible vertex found");
  return best;
}

}  // namespace saddlepoint
