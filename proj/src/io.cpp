#include "saddlepoint/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace saddlepoint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object())
    throw std::invalid_argument("parse: expected object at " + where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) { ok = true; break; }
    if (!ok)
      throw std::invalid_argument("parse: unknown key '" + it.key() + "' in " +
                                  where);
  }
}

std::vector<double> parse_vector(const json& j, const std::string& where) {
  if (!j.is_array())
    throw std::invalid_argument("parse: expected array at " + where);
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (e.is_number()) {
      v.push_back(e.get<double>());
    } else if (e.is_string()) {
      std::string s = e.get<std::string>();
      if (s == "inf" || s == "+inf") v.push_back(kInf);
      else if (s == "-inf") v.push_back(-kInf);
      else throw std::invalid_argument("parse: bad number '" + s + "' in " + where);
    } else {
      throw std::invalid_argument("parse: bad entry in " + where);
    }
  }
  return v;
}

std::vector<std::vector<double>> parse_matrix(const json& j,
                                              const std::string& where) {
  if (!j.is_array())
    throw std::invalid_argument("parse: expected array at " + where);
  std::vector<std::vector<double>> m;
  for (const auto& row : j) m.push_back(parse_vector(row, where));
  return m;
}

Family parse_family_tag(const std::string& tag) {
  if (tag == "RelativeEntropy") return Family::RelativeEntropy;
  if (tag == "Quadratic") return Family::Quadratic;
  if (tag == "Burg") return Family::Burg;
  if (tag == "Fermi") return Family::Fermi;
  throw std::invalid_argument("parse: unknown family tag '" + tag + "'");
}

const char* family_name(Family f) {
  switch (f) {
    case Family::RelativeEntropy: return "RelativeEntropy";
    case Family::Quadratic: return "Quadratic";
    case Family::Burg: return "Burg";
    case Family::Fermi: return "Fermi";
    case Family::Custom: return "Custom";
  }
  return "?";
}

json vector_to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) {
    if (std::isinf(x)) a.push_back(x > 0 ? "inf" : "-inf");
    else a.push_back(x);
  }
  return a;
}

// deterministic uniforms: identical output on every platform
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return eng() % n; }
};
}  // namespace

std::string qualification_name(Qualification q) {
  switch (q) {
    case Qualification::Interior: return "Interior";
    case Qualification::Boundary: return "Boundary";
    case Qualification::Outside: return "Outside";
    case Qualification::Unavailable: return "Unavailable";
  }
  return "?";
}

ProblemFile parse_problem(const json& j) {
  check_keys(j, {"kind", "reference", "family", "features", "constraint", "mu",
                 "nu", "cost"},
             "problem");
  if (!j.contains("kind"))
    throw std::invalid_argument("parse: missing 'kind'");
  std::string kind = j.at("kind").get<std::string>();
  ProblemFile pf;
  if (kind == "ot") {
    pf.kind = ProblemKind::Ot;
    for (const char* k : {"reference", "family", "features", "constraint"})
      if (j.contains(k))
        throw std::invalid_argument(std::string("parse: key '") + k +
                                    "' not valid for ot problems");
    pf.ot.mu = parse_vector(j.at("mu"), "mu");
    pf.ot.nu = parse_vector(j.at("nu"), "nu");
    pf.ot.cost = parse_matrix(j.at("cost"), "cost");
    pf.ot.validate();
    return pf;
  }
  if (kind != "entropy")
    throw std::invalid_argument("parse: kind must be 'entropy' or 'ot'");
  for (const char* k : {"mu", "nu", "cost"})
    if (j.contains(k))
      throw std::invalid_argument(std::string("parse: key '") + k +
                                  "' not valid for entropy problems");
  pf.kind = ProblemKind::Entropy;

  const json& ref = j.at("reference");
  check_keys(ref, {"support", "weights"}, "reference");
  std::vector<SupportPoint> sup;
  for (const auto& id : ref.at("support"))
    sup.push_back({id.get<std::string>(), {}});
  pf.entropy.reference =
      DiscreteMeasure(std::move(sup), parse_vector(ref.at("weights"), "weights"));

  const json& fam = j.at("family");
  check_keys(fam, {"tag", "params"}, "family");
  IntegrandFamily family(parse_family_tag(fam.at("tag").get<std::string>()));
  if (fam.contains("params")) {
    check_keys(fam.at("params"), {"scale_c", "scale_d"}, "family.params");
    std::vector<double> c, d;
    if (fam.at("params").contains("scale_c"))
      c = parse_vector(fam.at("params").at("scale_c"), "scale_c");
    if (fam.at("params").contains("scale_d"))
      d = parse_vector(fam.at("params").at("scale_d"), "scale_d");
    family.set_scales(std::move(c), std::move(d));
  }
  pf.entropy.family = family;

  auto rows = parse_matrix(j.at("features"), "features");
  if (rows.empty()) throw std::invalid_argument("parse: empty features");
  std::size_t k = rows[0].size();
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != k)
      throw std::invalid_argument("parse: ragged features table");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  pf.entropy.features = FeatureMap(rows.size(), k, std::move(flat));

  const json& con = j.at("constraint");
  check_keys(con, {"type", "values", "lower", "upper"}, "constraint");
  std::string type = con.at("type").get<std::string>();
  if (type == "equality") {
    pf.entropy.constraint =
        EqualityConstraint{parse_vector(con.at("values"), "constraint.values")};
  } else if (type == "box") {
    pf.entropy.constraint =
        BoxConstraint{parse_vector(con.at("lower"), "constraint.lower"),
                      parse_vector(con.at("upper"), "constraint.upper")};
  } else {
    throw std::invalid_argument("parse: constraint type must be equality or box");
  }
  pf.entropy.validate();
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open problem file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
  }
  return parse_problem(j);
}

json problem_to_json(const ProblemFile& p) {
  json j;
  if (p.kind == ProblemKind::Ot) {
    j["kind"] = "ot";
    j["mu"] = vector_to_json(p.ot.mu);
    j["nu"] = vector_to_json(p.ot.nu);
    json c = json::array();
    for (const auto& row : p.ot.cost) c.push_back(vector_to_json(row));
    j["cost"] = c;
    return j;
  }
  j["kind"] = "entropy";
  json ref;
  json ids = json::array();
  for (const auto& sp : p.entropy.reference.support) ids.push_back(sp.id);
  ref["support"] = ids;
  ref["weights"] = vector_to_json(p.entropy.reference.weights);
  j["reference"] = ref;
  json fam;
  fam["tag"] = family_name(p.entropy.family.tag());
  json params = json::object();
  if (!p.entropy.family.scales_c().empty())
    params["scale_c"] = vector_to_json(p.entropy.family.scales_c());
  if (!p.entropy.family.scales_d().empty())
    params["scale_d"] = vector_to_json(p.entropy.family.scales_d());
  fam["params"] = params;
  j["family"] = fam;
  json feats = json::array();
  for (std::size_t z = 0; z < p.entropy.features.rows; ++z) {
    json row = json::array();
    for (std::size_t c = 0; c < p.entropy.features.cols; ++c)
      row.push_back(p.entropy.features.at(z, c));
    feats.push_back(row);
  }
  j["features"] = feats;
  json con;
  if (p.entropy.is_equality()) {
    con["type"] = "equality";
    con["values"] = vector_to_json(p.entropy.target());
  } else {
    con["type"] = "box";
    con["lower"] = vector_to_json(p.entropy.box().lower);
    con["upper"] = vector_to_json(p.entropy.box().upper);
  }
  j["constraint"] = con;
  return j;
}

json certificate_to_json(const Certificate& c) {
  json j;
  j["primal_value"] = c.primal_value;
  j["dual_value"] = c.dual_value;
  j["gap"] = c.gap;
  j["young_residual"] = c.young_residual;
  json kkt;
  kkt["constraint_residual"] = c.kkt.constraint_residual;
  kkt["support_condition_residual"] =
      std::isinf(c.kkt.support_condition_residual)
          ? json("inf")
          : json(c.kkt.support_condition_residual);
  kkt["representation_residual"] = c.kkt.representation_residual;
  j["kkt"] = kkt;
  j["qualification"] = qualification_name(c.qualification);
  j["converged"] = c.converged;
  j["tol"] = c.tol;
  return j;
}

namespace {
json meta_json(double tol, int iterations) {
  json m;
  m["version"] = "1";
  json t;
  t["tol"] = tol;
  m["tolerances"] = t;
  m["iterations"] = iterations;
  return m;
}
}  // namespace

json entropy_solution_to_json(const EqualitySolveResult& r,
                              const SolverOptions& opts) {
  json j;
  j["y"] = vector_to_json(r.dual.y);
  j["Q"] = vector_to_json(r.primal.q.weights);
  j["value"] = r.primal.value;
  j["certificate"] = certificate_to_json(r.cert);
  j["meta"] = meta_json(opts.tol, r.dual.iterations);
  if (!r.diagnostic.empty()) j["meta"]["diagnostic"] = r.diagnostic;
  return j;
}

json box_solution_to_json(const BoxSolveResult& r, const SolverOptions& opts) {
  json j;
  j["y"] = vector_to_json(r.dual.y);
  j["Q"] = vector_to_json(r.primal.q.weights);
  j["value"] = r.primal.value;
  j["x_opt"] = vector_to_json(r.x_opt);
  j["certificate"] = certificate_to_json(r.cert);
  j["meta"] = meta_json(opts.tol, r.dual.iterations);
  if (!r.diagnostic.empty()) j["meta"]["diagnostic"] = r.diagnostic;
  return j;
}

json ot_solution_to_json(const TransportSolveResult& r) {
  json j;
  json plan = json::array();
  for (const auto& row : r.plan.pi) plan.push_back(vector_to_json(row));
  j["plan"] = plan;
  j["f"] = vector_to_json(r.pot.f);
  j["g"] = vector_to_json(r.pot.g);
  j["value"] = r.cert.primal_value;
  j["certificate"] = certificate_to_json(r.cert);
  j["meta"] = meta_json(r.cert.tol, 0);
  return j;
}

CertifyReport certify_entropy(const MomentProblem& p, const json& solution,
                              double tol) {
  check_keys(solution, {"y", "Q", "value", "x_opt", "certificate", "meta"},
             "solution");
  auto y = parse_vector(solution.at("y"), "y");
  auto qw = parse_vector(solution.at("Q"), "Q");
  double stated = solution.at("value").get<double>();
  if (y.size() != p.features.cols) return {false, "y length mismatch"};
  if (qw.size() != p.reference.size()) return {false, "Q length mismatch"};

  DiscreteMeasure q(p.reference.support, qw);
  double primal = entropy_value(p.family, p.reference, q);
  if (!std::isfinite(primal)) return {false, "I(Q) is infinite"};
  if (std::fabs(primal - stated) > tol * (1.0 + std::fabs(stated)))
    return {false, "stated value does not match I(Q)"};

  auto kkt = kkt_report(p, q, y);
  double scale = 0.0;
  if (p.is_equality())
    for (double v : p.target()) scale = std::max(scale, std::fabs(v));
  if (kkt.constraint_residual > 1e-7 * (1.0 + scale))
    return {false, "constraint residual too large"};

  double gamma = log_partition(p, y);
  if (!std::isfinite(gamma)) return {false, "dual point outside domain"};
  double dual = min_over_constraint(p, y) - gamma;
  if (std::isinf(dual)) return {false, "support condition violated at infinity"};
  if (!saddle_check(primal, dual, tol)) return {false, "duality gap too large"};

  double qscale = 0.0;
  for (double v : qw) qscale = std::max(qscale, std::fabs(v));
  if (kkt.representation_residual > tol * 10.0 * (1.0 + qscale))
    return {false, "representation residual too large"};
  if (kkt.support_condition_residual > tol * (1.0 + std::fabs(primal)))
    return {false, "support condition residual too large"};
  double young = young_residual(p, q, y);
  if (young > std::max(1e-10, tol) * (1.0 + std::fabs(primal)))
    return {false, "Young residual too large"};
  return {true, ""};
}

CertifyReport certify_ot(const TransportProblem& p, const json& solution,
                         double tol) {
  check_keys(solution, {"plan", "f", "g", "value", "certificate", "meta"},
             "solution");
  auto pi = parse_matrix(solution.at("plan"), "plan");
  auto f = parse_vector(solution.at("f"), "f");
  auto g = parse_vector(solution.at("g"), "g");
  double stated = solution.at("value").get<double>();
  if (pi.size() != p.m() || f.size() != p.m() || g.size() != p.n())
    return {false, "dimension mismatch"};
  for (const auto& row : pi)
    if (row.size() != p.n()) return {false, "dimension mismatch"};

  for (std::size_t i = 0; i < p.m(); ++i)
    for (std::size_t j = 0; j < p.n(); ++j)
      if (pi[i][j] < -1e-12) return {false, "negative plan entry"};
  for (std::size_t i = 0; i < p.m(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.n(); ++j) s += pi[i][j];
    if (std::fabs(s - p.mu[i]) > 1e-9) return {false, "row marginal violated"};
  }
  for (std::size_t j = 0; j < p.n(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.m(); ++i) s += pi[i][j];
    if (std::fabs(s - p.nu[j]) > 1e-9) return {false, "column marginal violated"};
  }
  for (std::size_t i = 0; i < p.m(); ++i)
    for (std::size_t j = 0; j < p.n(); ++j)
      if (f[i] + g[j] > p.cost[i][j] + 1e-9)
        return {false, "potentials not dual-feasible"};

  double primal = 0.0;
  for (std::size_t i = 0; i < p.m(); ++i)
    for (std::size_t j = 0; j < p.n(); ++j) primal += pi[i][j] * p.cost[i][j];
  double dual = 0.0;
  for (std::size_t i = 0; i < p.m(); ++i) dual += f[i] * p.mu[i];
  for (std::size_t j = 0; j < p.n(); ++j) dual += g[j] * p.nu[j];
  if (std::fabs(primal - stated) > tol * (1.0 + std::fabs(stated)))
    return {false, "stated value does not match the plan cost"};
  if (!saddle_check(primal, dual, std::max(tol, 1e-9)))
    return {false, "duality gap too large"};

  TransportPlan plan{pi};
  Potentials pot{f, g};
  if (!slackness_check(p, plan, pot, 1e-9).empty())
    return {false, "complementary slackness violated"};
  return {true, ""};
}

ProblemFile gen_entropy_instance(std::uint64_t seed, std::size_t n,
                                 std::size_t k) {
  if (n < 1 || k < 1) throw std::invalid_argument("gen: size must be >= 1");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  ProblemFile pf;
  pf.kind = ProblemKind::Entropy;

  std::vector<double> coords(n), weights(n);
  for (std::size_t z = 0; z < n; ++z) {
    coords[z] = rng.uniform(-1.0, 1.0);
    weights[z] = rng.uniform(0.2, 1.0);
  }
  pf.entropy.reference = make_measure(coords, weights);
  pf.entropy.family = IntegrandFamily(Family::RelativeEntropy);

  FeatureMap t(n, k);
  for (std::size_t z = 0; z < n; ++z) {
    t.at(z, 0) = 1.0;  // mass feature
    for (std::size_t c = 1; c < k; ++c) t.at(z, c) = rng.uniform(-1.0, 1.0);
  }
  pf.entropy.features = t;

  // target = moments of a random strictly positive measure
  std::vector<double> qw(n);
  for (std::size_t z = 0; z < n; ++z) qw[z] = rng.uniform(0.1, 1.0);
  double mass = 0.0;
  for (double v : qw) mass += v;
  for (double& v : qw) v /= mass;  // unit mass keeps scales tame
  DiscreteMeasure q0 = make_measure(coords, qw);
  pf.entropy.constraint = EqualityConstraint{push_moments(t, q0)};
  return pf;
}

ProblemFile gen_ot_instance(std::uint64_t seed, std::size_t m, std::size_t n) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen: size must be >= 1");
  Rng rng(seed ^ 0x6a09e667f3bcc909ull);
  ProblemFile pf;
  pf.kind = ProblemKind::Ot;

  const std::uint64_t grid = 4096;  // dyadic 2^-12
  auto composition = [&](std::size_t parts) {
    // integer composition of `grid` into `parts` positive pieces
    std::vector<std::uint64_t> cuts;
    for (std::size_t i = 0; i + 1 < parts; ++i) {
      std::uint64_t c;
      bool fresh;
      do {
        c = 1 + rng.below(grid - 1);
        fresh = true;
        for (auto prev : cuts) fresh = fresh && prev != c;
      } while (!fresh);
      cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(grid);
    std::vector<double> w(parts);
    std::uint64_t last = 0;
    for (std::size_t i = 0; i < parts; ++i) {
      w[i] = static_cast<double>(cuts[i] - last) / static_cast<double>(grid);
      last = cuts[i];
    }
    return w;
  };
  pf.ot.mu = composition(m);
  pf.ot.nu = composition(n);
  pf.ot.cost.assign(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      pf.ot.cost[i][j] =
          static_cast<double>(rng.below(grid + 1)) / static_cast<double>(grid);
  return pf;
}

}  // namespace saddlepoint
