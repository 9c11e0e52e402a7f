#pragma once

#include <json.hpp>

#include <string>

#include "saddlepoint/moment_solver.hpp"
#include "saddlepoint/transport.hpp"

namespace saddlepoint {

using json = nlohmann::ordered_json;

enum class ProblemKind { Entropy, Ot };

struct ProblemFile {
  ProblemKind kind = ProblemKind::Entropy;
  MomentProblem entropy;
  TransportProblem ot;
};

/// Strict parsers: unknown keys are rejected.
ProblemFile parse_problem(const json& j);
ProblemFile load_problem(const std::string& path);
json problem_to_json(const ProblemFile& p);

json entropy_solution_to_json(const EqualitySolveResult& r,
                              const SolverOptions& opts);
json box_solution_to_json(const BoxSolveResult& r, const SolverOptions& opts);
json ot_solution_to_json(const TransportSolveResult& r);
json certificate_to_json(const Certificate& c);

std::string qualification_name(Qualification q);

struct CertifyReport {
  bool ok = false;
  std::string failure;  // first failed check, empty when ok
};

/// Re-derives every residual from the problem and the candidate solution in
/// the file; never trusts the stored certificate.
CertifyReport certify_entropy(const MomentProblem& p, const json& solution,
                              double tol);
CertifyReport certify_ot(const TransportProblem& p, const json& solution,
                         double tol);

/// Deterministic instance generators: a fixed xorshift-free construction on
/// top of mt19937_64 so a seed reproduces bit-identical files.
ProblemFile gen_entropy_instance(std::uint64_t seed, std::size_t n,
                                 std::size_t k);
/// Transport data lives on the dyadic grid 2^-12 so optimality certificates
/// are exact in double precision.
ProblemFile gen_ot_instance(std::uint64_t seed, std::size_t m, std::size_t n);

}  // namespace saddlepoint

namespace saddlepoint::cli {
/// CLI front end; args excludes the program name. Exit codes: 0 success,
/// 1 structural error, 2 solver non-convergence, 3 certification failure.
int run(const std::vector<std::string>& args);
}  // namespace saddlepoint::cli
