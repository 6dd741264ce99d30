#pragma once

#include "pqsys/example_reactions.hpp"
#include "pqsys/galerkin.hpp"

#include <optional>
#include <string>

namespace pqsys {

/// Run description parsed from the key = value config format. A parsed
/// config re-serializes to an equivalent config (round-trip identity on the
/// canonical form printed by serialize_config).
struct RunConfig {
  // [domain]
  std::string domain_type = "unit_square";
  int cells = 2;
  int levels = 4;

  // [problem]
  Real p1 = 1.8, q1 = 1.3, p2 = 1.7, q2 = 1.2;
  Real mu1 = 0.0, mu2 = 0.0;

  // [reactions]
  std::string reaction_type = "example44";  // or "expression"
  Real alpha1 = 1.5, alpha2 = 1.5;
  Real beta1 = 0.0, beta2 = 0.0;  // 0 = default (80% of the admissible bound)
  std::string h1 = "0", h2 = "0";
  std::string f1_expr, f2_expr;  // required for type = expression

  // [hypotheses]
  Real c1 = 0.05, c2 = 0.05, d1 = 0.05, d2 = 0.05;
  Real C1 = 1.0, C2 = 1.0;
  std::string sigma1 = "0", sigma2 = "0";
  std::string gamma1 = "0", gamma2 = "0";
  std::optional<Real> D1, D2, r1, s1, r2, s2;
  long samples = 100000;
  Real max_magnitude = 1e4;

  // [solver]
  Real tol = 1e-8;
  int newton_max_iterations = 50;
  int eps_stages = 6;
  Real eps_start = 1e-2, eps_end = 1e-8;
  bool override_hypotheses = false;
  std::string init = "sine";  // level-0 iterate: "zero" or "sine"

  // [eigen]
  Real eigen_r = 2.0;
  Real eigen_tol = 1e-9;
  int eigen_max_iterations = 200;
  int eigen_level_cap = 3;

  // [probe]
  Real probe_mu = 1.0;
  int probe_points = 400;

  // [output]
  std::string output_directory = "out";

  // [run]
  std::uint64_t seed = 42;

  bool operator==(const RunConfig&) const = default;
};

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line(line),
        column(column) {}
  int line, column;
};

/// Parses and validates; unknown sections or keys are errors, as are
/// exponent combinations outside 1 < q_i < p_i < 2.
RunConfig parse_config(const std::string& text);

/// Canonical form: every key, fixed order, full precision.
std::string serialize_config(const RunConfig& config);

/// Problem objects derived from a config. For example44 reactions the
/// certified constants override the sigma/gamma config fields.
struct BuiltProblem {
  ProblemSpec spec;
  HypothesisConstants constants;
};

BuiltProblem build_problem(const RunConfig& config, const Mesh& base_mesh);

SolverOptions solver_options(const RunConfig& config);
HierarchyControls hierarchy_controls(const RunConfig& config, const Mesh& base_mesh);

}  // namespace pqsys
