#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "saddlepoint/gauge.hpp"
#include "saddlepoint/io.hpp"
#include "saddlepoint/oracles.hpp"

namespace saddlepoint::cli {

namespace {

constexpr int kOk = 0;
constexpr int kStructural = 1;
constexpr int kNoConvergence = 2;
constexpr int kCertFailure = 3;

// flags > SADDLEPOINT_TOL > built-in default
double resolve_tol(bool flag_given, double flag_value, double fallback) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("SADDLEPOINT_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0))
      throw std::invalid_argument("SADDLEPOINT_TOL is not a positive number");
    return v;
  }
  return fallback;
}

void emit(const json& j, const std::string& out_path) {
  std::string text = j.dump(2);
  text.push_back('\n');
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write file: " + out_path);
    out << text;
  }
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write file: " + out_path);
    out << text;
  }
}

std::string csv_row(const std::string& head, const std::vector<double>& v) {
  std::ostringstream os;
  os << head;
  for (double x : v) os << ',' << json(x).dump();
  os << '\n';
  return os.str();
}

std::string entropy_csv(const json& sol) {
  std::ostringstream os;
  os << csv_row("y", sol.at("y").get<std::vector<double>>());
  os << csv_row("Q", sol.at("Q").get<std::vector<double>>());
  os << "value," << sol.at("value").dump() << '\n';
  os << "gap," << sol.at("certificate").at("gap").dump() << '\n';
  return os.str();
}

std::string ot_csv(const json& sol) {
  std::ostringstream os;
  for (const auto& row : sol.at("plan"))
    os << csv_row("plan", row.get<std::vector<double>>());
  os << csv_row("f", sol.at("f").get<std::vector<double>>());
  os << csv_row("g", sol.at("g").get<std::vector<double>>());
  os << "value," << sol.at("value").dump() << '\n';
  os << "gap," << sol.at("certificate").at("gap").dump() << '\n';
  return os.str();
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double x = std::stod(tok, &used);
    if (used != tok.size())
      throw std::invalid_argument("bad coordinate '" + tok + "'");
    v.push_back(x);
  }
  if (v.empty()) throw std::invalid_argument("empty point");
  return v;
}

Family family_from_tag(const std::string& tag) {
  if (tag == "RelativeEntropy") return Family::RelativeEntropy;
  if (tag == "Quadratic") return Family::Quadratic;
  if (tag == "Burg") return Family::Burg;
  if (tag == "Fermi") return Family::Fermi;
  throw std::invalid_argument("unknown family tag '" + tag + "'");
}

struct GaugeFile {
  IntegrandFamily family{Family::Quadratic};
  std::vector<double> weights;
  bool symmetrized = true;
};

// Gauge spec file: a weighted separable theta built from an integrand family,
//   theta(s) = sum_i w_i * lambda_i(s_i)
// (lambda_max when "symmetrized", the default, so the level set is symmetric).
GaugeFile load_gauge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open gauge file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "family" && it.key() != "weights" &&
        it.key() != "symmetrized")
      throw std::invalid_argument("unknown key '" + it.key() +
                                  "' in gauge file");
  GaugeFile gf;
  const json& fam = j.at("family");
  for (auto it = fam.begin(); it != fam.end(); ++it)
    if (it.key() != "tag" && it.key() != "params")
      throw std::invalid_argument("unknown key '" + it.key() + "' in family");
  gf.family = IntegrandFamily(family_from_tag(fam.at("tag").get<std::string>()));
  if (fam.contains("params")) {
    std::vector<double> c, d;
    const json& params = fam.at("params");
    for (auto it = params.begin(); it != params.end(); ++it)
      if (it.key() != "scale_c" && it.key() != "scale_d")
        throw std::invalid_argument("unknown key '" + it.key() + "' in params");
    if (params.contains("scale_c"))
      c = params.at("scale_c").get<std::vector<double>>();
    if (params.contains("scale_d"))
      d = params.at("scale_d").get<std::vector<double>>();
    gf.family.set_scales(std::move(c), std::move(d));
  }
  gf.weights = j.at("weights").get<std::vector<double>>();
  if (gf.weights.empty())
    throw std::invalid_argument("gauge file needs at least one weight");
  for (double w : gf.weights)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
  if (j.contains("symmetrized")) gf.symmetrized = j.at("symmetrized").get<bool>();
  return gf;
}

ConvexGaugeSpec make_gauge_spec(const GaugeFile& gf) {
  ConvexGaugeSpec spec;
  spec.dim = gf.weights.size();
  spec.theta = [gf](std::span<const double> s) {
    double total = 0.0;
    for (std::size_t i = 0; i < gf.weights.size(); ++i) {
      double l = gf.symmetrized ? gf.family.lambda_max(i, s[i])
                                : gf.family.lambda(i, s[i]);
      total += gf.weights[i] * l;
    }
    return total;
  };
  return spec;
}

int cmd_solve_entropy(const std::string& problem_path, bool tol_given,
                      double tol_flag, int max_iter, bool oracle,
                      const std::string& out_path, const std::string& format) {
  SolverOptions opts;
  opts.tol = resolve_tol(tol_given, tol_flag, opts.tol);
  opts.max_iter = max_iter;

  ProblemFile pf = load_problem(problem_path);
  if (pf.kind != ProblemKind::Entropy) {
    std::cerr << "solve-entropy: problem file has kind 'ot'\n";
    return kStructural;
  }
  const MomentProblem& p = pf.entropy;

  json sol;
  const Certificate* cert = nullptr;
  EqualitySolveResult er;
  BoxSolveResult br;
  if (p.is_equality()) {
    er = solve_equality(p, opts);
    sol = entropy_solution_to_json(er, opts);
    cert = &er.cert;
  } else {
    br = solve_box(p, opts);
    sol = box_solution_to_json(br, opts);
    cert = &br.cert;
  }

  bool oracle_ok = true;
  if (oracle) {
    if (p.is_equality() && p.reference.size() <= 4) {
      const double h = 1e-3;
      double theta_inf = 0.0;
      for (double v : p.features.data) theta_inf = std::max(theta_inf, std::fabs(v));
      double slack = std::max(2e-3, theta_inf * static_cast<double>(p.reference.size()) * h);
      auto gr = entropy_oracle_grid(p, h, slack);
      json o;
      o["value"] = gr.value;
      o["error_bound"] = gr.error_bound;
      o["feasible"] = gr.feasible;
      oracle_ok = gr.feasible &&
                  cert->primal_value >= gr.value - 1e-9 &&
                  cert->primal_value <= gr.value + gr.error_bound;
      o["agrees"] = oracle_ok;
      sol["meta"]["oracle"] = o;
    } else {
      sol["meta"]["oracle"] = "unsupported for this instance";
    }
  }

  if (format == "csv") emit_text(entropy_csv(sol), out_path);
  else emit(sol, out_path);

  if (!cert->converged) {
    std::cerr << "solve-entropy: not converged";
    if (cert->qualification == Qualification::Outside)
      std::cerr << " (qualification=Outside)";
    std::cerr << '\n';
    return kNoConvergence;
  }
  if (!oracle_ok) {
    std::cerr << "solve-entropy: oracle cross-check failed\n";
    return kCertFailure;
  }
  return kOk;
}

int cmd_solve_ot(const std::string& problem_path, bool oracle,
                 const std::string& out_path, const std::string& format) {
  ProblemFile pf = load_problem(problem_path);
  if (pf.kind != ProblemKind::Ot) {
    std::cerr << "solve-ot: problem file has kind 'entropy'\n";
    return kStructural;
  }
  auto res = solve_ot(pf.ot);
  json sol = ot_solution_to_json(res);

  bool oracle_ok = true;
  if (oracle) {
    if (pf.ot.m() <= 4 && pf.ot.n() <= 4) {
      double ov = ot_oracle_vertices(pf.ot);
      oracle_ok = std::fabs(res.cert.primal_value - ov) <= 1e-9;
      json o;
      o["value"] = ov;
      o["agrees"] = oracle_ok;
      sol["meta"]["oracle"] = o;
    } else {
      sol["meta"]["oracle"] = "unsupported for this instance";
    }
  }

  if (format == "csv") emit_text(ot_csv(sol), out_path);
  else emit(sol, out_path);

  if (!oracle_ok) {
    std::cerr << "solve-ot: oracle cross-check failed\n";
    return kCertFailure;
  }
  return kOk;
}

int cmd_gauge(const std::string& spec_path, const std::string& op,
              const std::string& point_str, const std::string& out_path) {
  GaugeFile gf = load_gauge_file(spec_path);
  ConvexGaugeSpec spec = make_gauge_spec(gf);
  auto point = parse_point(point_str);
  if (point.size() != spec.dim)
    throw std::invalid_argument("point dimension does not match the spec");

  json out;
  out["op"] = op;
  out["point"] = point;
  int code = kOk;
  if (op == "gauge") {
    out["value"] = gauge(spec, point);
  } else if (op == "support") {
    out["value"] = support_of_levelset(spec, point);
  } else {
    auto sw = pgauge_sandwich(spec, point);
    out["lower"] = sw.lower;
    out["mid"] = sw.mid;
    out["upper"] = sw.upper;
    out["ok"] = sw.ok;
    if (!sw.ok) code = kCertFailure;
  }
  emit(out, out_path);
  return code;
}

int cmd_certify(const std::string& problem_path, const std::string& solution_path,
                bool tol_given, double tol_flag) {
  double tol = resolve_tol(tol_given, tol_flag, 1e-8);
  ProblemFile pf = load_problem(problem_path);
  std::ifstream in(solution_path);
  if (!in)
    throw std::invalid_argument("cannot open solution file: " + solution_path);
  json sol;
  try {
    in >> sol;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("bad JSON in " + solution_path + ": " + e.what());
  }
  CertifyReport rep = pf.kind == ProblemKind::Entropy
                          ? certify_entropy(pf.entropy, sol, tol)
                          : certify_ot(pf.ot, sol, tol);
  json out;
  out["ok"] = rep.ok;
  if (!rep.ok) out["failure"] = rep.failure;
  emit(out, "");
  return rep.ok ? kOk : kCertFailure;
}

int cmd_gen(const std::string& kind, std::uint64_t seed,
            const std::vector<std::size_t>& size, const std::string& out_path) {
  if (size.size() != 2)
    throw std::invalid_argument("--size takes two integers");
  ProblemFile pf = kind == "entropy"
                       ? gen_entropy_instance(seed, size[0], size[1])
                       : gen_ot_instance(seed, size[0], size[1]);
  emit(problem_to_json(pf), out_path);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Saddle-point duality solvers with optimality certificates"};
  app.require_subcommand(1);

  std::string problem_path, solution_path, out_path, format = "json";
  std::string gauge_op, gauge_point, gen_kind;
  double tol = 0.0;
  int max_iter = 200;
  bool oracle = false;
  std::uint64_t seed = 0;
  std::vector<std::size_t> size;

  auto* se = app.add_subcommand("solve-entropy",
                                "Solve an entropy moment problem");
  se->add_option("problem", problem_path, "problem file")->required();
  auto* se_tol = se->add_option("--tol", tol, "convergence tolerance");
  se->add_option("--max-iter", max_iter, "Newton iteration cap");
  se->add_flag("--oracle", oracle, "cross-check against the grid oracle");
  se->add_option("--out", out_path, "output file (default stdout)");
  se->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* so = app.add_subcommand("solve-ot", "Solve a discrete transport problem");
  so->add_option("problem", problem_path, "problem file")->required();
  so->add_flag("--oracle", oracle, "cross-check against the vertex oracle");
  so->add_option("--out", out_path, "output file (default stdout)");
  so->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* ga = app.add_subcommand("gauge", "Gauge / support-function queries");
  ga->add_option("spec", problem_path, "gauge spec file")->required();
  ga->add_option("--op", gauge_op, "operation")
      ->required()
      ->check(CLI::IsMember({"gauge", "support", "sandwich"}));
  ga->add_option("--point", gauge_point, "comma-separated coordinates")
      ->required();
  ga->add_option("--out", out_path, "output file (default stdout)");

  auto* ce = app.add_subcommand("certify", "Re-check a solution file");
  ce->add_option("problem", problem_path, "problem file")->required();
  ce->add_option("solution", solution_path, "solution file")->required();
  auto* ce_tol = ce->add_option("--tol", tol, "certification tolerance");

  auto* ge = app.add_subcommand("gen", "Generate a deterministic instance");
  ge->add_option("kind", gen_kind, "entropy or ot")
      ->required()
      ->check(CLI::IsMember({"entropy", "ot"}));
  ge->add_option("--seed", seed, "RNG seed")->required();
  ge->add_option("--size", size, "entropy: n k; ot: m n")->required();
  ge->add_option("--out", out_path, "output file (default stdout)");

  std::vector<const char*> argv;
  argv.push_back("saddlepoint");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kStructural;
  }

  try {
    if (se->parsed())
      return cmd_solve_entropy(problem_path, se_tol->count() > 0, tol, max_iter,
                               oracle, out_path, format);
    if (so->parsed()) return cmd_solve_ot(problem_path, oracle, out_path, format);
    if (ga->parsed()) return cmd_gauge(problem_path, gauge_op, gauge_point, out_path);
    if (ce->parsed())
      return cmd_certify(problem_path, solution_path, ce_tol->count() > 0, tol);
    if (ge->parsed()) return cmd_gen(gen_kind, seed, size, out_path);
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStructural;
  }
  return kStructural;
}

}  // namespace saddlepoint::cli
