#include "pqsys/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <vector>

namespace pqsys {

namespace {

struct Position {
  int line = 0, column = 0;
};

struct ParserState {
  RunConfig config;
  std::map<std::string, Position> positions;  // "section.key" -> where it was set

  Position at(const std::string& key) const {
    auto it = positions.find(key);
    return it == positions.end() ? Position{0, 0} : it->second;
  }
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

Real parse_real(const std::string& value, const Position& pos) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const Real v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError("malformed number '" + value + "'", pos.line, pos.column);
  return v;
}

long parse_long(const std::string& value, const Position& pos) {
  const Real v = parse_real(value, pos);
  if (v != std::floor(v)) throw ConfigError("expected an integer, got '" + value + "'", pos.line, pos.column);
  return static_cast<long>(v);
}

bool parse_bool(const std::string& value, const Position& pos) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("expected true or false, got '" + value + "'", pos.line, pos.column);
}

void check_expression(const std::string& text, const Position& pos) {
  try {
    Expression::parse(text);
  } catch (const ExpressionError& err) {
    throw ConfigError(std::string("bad expression: ") + err.what(), pos.line, pos.column);
  }
}

void assign(ParserState& state, const std::string& section, const std::string& key,
            const std::string& value, const Position& pos) {
  RunConfig& c = state.config;
  state.positions[section + "." + key] = pos;
  const std::string full = section + "." + key;

  if (section == "domain") {
    if (key == "type") { c.domain_type = value; return; }
    if (key == "cells") { c.cells = static_cast<int>(parse_long(value, pos)); return; }
    if (key == "levels") { c.levels = static_cast<int>(parse_long(value, pos)); return; }
  } else if (section == "problem") {
    if (key == "p1") { c.p1 = parse_real(value, pos); return; }
    if (key == "q1") { c.q1 = parse_real(value, pos); return; }
    if (key == "p2") { c.p2 = parse_real(value, pos); return; }
    if (key == "q2") { c.q2 = parse_real(value, pos); return; }
    if (key == "mu1") { c.mu1 = parse_real(value, pos); return; }
    if (key == "mu2") { c.mu2 = parse_real(value, pos); return; }
  } else if (section == "reactions") {
    if (key == "type") { c.reaction_type = value; return; }
    if (key == "alpha1") { c.alpha1 = parse_real(value, pos); return; }
    if (key == "alpha2") { c.alpha2 = parse_real(value, pos); return; }
    if (key == "beta1") { c.beta1 = parse_real(value, pos); return; }
    if (key == "beta2") { c.beta2 = parse_real(value, pos); return; }
    if (key == "h1") { check_expression(value, pos); c.h1 = value; return; }
    if (key == "h2") { check_expression(value, pos); c.h2 = value; return; }
    if (key == "f1") { check_expression(value, pos); c.f1_expr = value; return; }
    if (key == "f2") { check_expression(value, pos); c.f2_expr = value; return; }
  } else if (section == "hypotheses") {
    if (key == "c1") { c.c1 = parse_real(value, pos); return; }
    if (key == "c2") { c.c2 = parse_real(value, pos); return; }
    if (key == "d1") { c.d1 = parse_real(value, pos); return; }
    if (key == "d2") { c.d2 = parse_real(value, pos); return; }
    if (key == "C1") { c.C1 = parse_real(value, pos); return; }
    if (key == "C2") { c.C2 = parse_real(value, pos); return; }
    if (key == "sigma1") { check_expression(value, pos); c.sigma1 = value; return; }
    if (key == "sigma2") { check_expression(value, pos); c.sigma2 = value; return; }
    if (key == "gamma1") { check_expression(value, pos); c.gamma1 = value; return; }
    if (key == "gamma2") { check_expression(value, pos); c.gamma2 = value; return; }
    if (key == "D1") { c.D1 = parse_real(value, pos); return; }
    if (key == "D2") { c.D2 = parse_real(value, pos); return; }
    if (key == "r1") { c.r1 = parse_real(value, pos); return; }
    if (key == "s1") { c.s1 = parse_real(value, pos); return; }
    if (key == "r2") { c.r2 = parse_real(value, pos); return; }
    if (key == "s2") { c.s2 = parse_real(value, pos); return; }
    if (key == "samples") { c.samples = parse_long(value, pos); return; }
    if (key == "max_magnitude") { c.max_magnitude = parse_real(value, pos); return; }
  } else if (section == "solver") {
    if (key == "tol") { c.tol = parse_real(value, pos); return; }
    if (key == "newton_max_iterations") { c.newton_max_iterations = static_cast<int>(parse_long(value, pos)); return; }
    if (key == "eps_stages") { c.eps_stages = static_cast<int>(parse_long(value, pos)); return; }
    if (key == "eps_start") { c.eps_start = parse_real(value, pos); return; }
    if (key == "eps_end") { c.eps_end = parse_real(value, pos); return; }
    if (key == "override_hypotheses") { c.override_hypotheses = parse_bool(value, pos); return; }
    if (key == "init") { c.init = value; return; }
  } else if (section == "eigen") {
    if (key == "r") { c.eigen_r = parse_real(value, pos); return; }
    if (key == "tol") { c.eigen_tol = parse_real(value, pos); return; }
    if (key == "max_iterations") { c.eigen_max_iterations = static_cast<int>(parse_long(value, pos)); return; }
    if (key == "level_cap") { c.eigen_level_cap = static_cast<int>(parse_long(value, pos)); return; }
  } else if (section == "probe") {
    if (key == "mu") { c.probe_mu = parse_real(value, pos); return; }
    if (key == "points") { c.probe_points = static_cast<int>(parse_long(value, pos)); return; }
  } else if (section == "output") {
    if (key == "directory") { c.output_directory = value; return; }
  } else if (section == "run") {
    if (key == "seed") { c.seed = static_cast<std::uint64_t>(parse_long(value, pos)); return; }
  } else {
    throw ConfigError("unknown section [" + section + "]", pos.line, pos.column);
  }
  throw ConfigError("unknown key '" + key + "' in section [" + section + "]", pos.line, pos.column);
}

void validate(const ParserState& state) {
  const RunConfig& c = state.config;
  auto reject = [&](const std::string& key, const std::string& msg) {
    const Position pos = state.at(key);
    throw ConfigError(msg, pos.line, pos.column);
  };

  if (c.domain_type != "unit_square") reject("domain.type", "unknown domain type '" + c.domain_type + "'");
  if (c.cells < 1) reject("domain.cells", "cells must be >= 1");
  if (c.levels < 1) reject("domain.levels", "levels must be >= 1");

  if (!(c.q1 > 1.0)) reject("problem.q1", "q1 <= 1 violates 1 < q_i < p_i < N");
  if (!(c.q2 > 1.0)) reject("problem.q2", "q2 <= 1 violates 1 < q_i < p_i < N");
  if (!(c.q1 < c.p1)) reject("problem.q1", "q1 >= p1 violates 1 < q_i < p_i < N");
  if (!(c.q2 < c.p2)) reject("problem.q2", "q2 >= p2 violates 1 < q_i < p_i < N");
  if (!(c.p1 < 2.0)) reject("problem.p1", "p1 >= 2 violates p_i < N = 2");
  if (!(c.p2 < 2.0)) reject("problem.p2", "p2 >= 2 violates p_i < N = 2");

  if (c.reaction_type == "example44") {
    const Real b1_max = c.p1 / (ProblemSpec::critical_exponent(c.p1) /
                                (ProblemSpec::critical_exponent(c.p1) - 1.0));
    const Real b2_max = c.p2 / (ProblemSpec::critical_exponent(c.p2) /
                                (ProblemSpec::critical_exponent(c.p2) - 1.0));
    if (!(c.alpha1 >= 1.0 && c.alpha1 < c.p1)) reject("reactions.alpha1", "alpha1 outside [1, p1)");
    if (!(c.alpha2 >= 1.0 && c.alpha2 < c.p2)) reject("reactions.alpha2", "alpha2 outside [1, p2)");
    if (c.beta1 != 0.0 && !(c.beta1 >= 1.0 && c.beta1 < b1_max))
      reject("reactions.beta1", "beta1 outside [1, p1/(p1*)')");
    if (c.beta2 != 0.0 && !(c.beta2 >= 1.0 && c.beta2 < b2_max))
      reject("reactions.beta2", "beta2 outside [1, p2/(p2*)')");
  } else if (c.reaction_type == "expression") {
    if (c.f1_expr.empty()) reject("reactions.f1", "expression reactions require f1");
    if (c.f2_expr.empty()) reject("reactions.f2", "expression reactions require f2");
  } else {
    reject("reactions.type", "unknown reaction type '" + c.reaction_type + "' (example44 or expression)");
  }

  for (auto [v, key, name] : {std::tuple{c.c1, "hypotheses.c1", "c1"}, {c.c2, "hypotheses.c2", "c2"},
                              {c.d1, "hypotheses.d1", "d1"}, {c.d2, "hypotheses.d2", "d2"}})
    if (!(v > 0.0)) reject(key, std::string(name) + " must be positive");
  if (c.samples < 1) reject("hypotheses.samples", "samples must be positive");
  if (!(c.max_magnitude > 0.0)) reject("hypotheses.max_magnitude", "max_magnitude must be positive");
  for (auto [r, key] : {std::pair{c.r1, "hypotheses.r1"}, {c.r2, "hypotheses.r2"}})
    if (r && !(*r > 1.0)) reject(key, "r_i must exceed 1");

  if (!(c.tol > 0.0)) reject("solver.tol", "tol must be positive");
  if (c.newton_max_iterations < 1) reject("solver.newton_max_iterations", "need at least one iteration");
  if (c.eps_stages < 1) reject("solver.eps_stages", "need at least one stage");
  if (!(c.eps_end > 0.0 && c.eps_start >= c.eps_end))
    reject("solver.eps_start", "need eps_start >= eps_end > 0");
  if (c.init != "zero" && c.init != "sine") reject("solver.init", "init must be zero or sine");

  if (!(c.eigen_r > 1.0 && c.eigen_r <= 2.0)) reject("eigen.r", "eigen r must lie in (1, 2]");
  if (!(c.eigen_tol > 0.0)) reject("eigen.tol", "eigen tol must be positive");
  if (c.eigen_max_iterations < 1) reject("eigen.max_iterations", "need at least one iteration");
  if (c.eigen_level_cap < 0) reject("eigen.level_cap", "level_cap must be >= 0");
  if (c.probe_points < 2) reject("probe.points", "probe needs at least two points");
  if (c.output_directory.empty()) reject("output.directory", "output directory must be nonempty");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  ParserState state;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw ConfigError("missing ']' in section header", line_no,
                          static_cast<int>(line.find('[')) + 1);
      section = trim(stripped.substr(1, stripped.size() - 2));
      static const char* known[] = {"domain", "problem", "reactions", "hypotheses",
                                    "solver", "eigen", "probe", "output", "run"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok)
        throw ConfigError("unknown section [" + section + "]", line_no,
                          static_cast<int>(line.find('[')) + 1);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line_no, 1);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    if (key.empty()) throw ConfigError("empty key", line_no, key_col);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no,
                                         static_cast<int>(eq) + 2);
    if (section.empty())
      throw ConfigError("key '" + key + "' outside any section", line_no, key_col);
    assign(state, section, key, value, Position{line_no, key_col});
  }
  validate(state);
  return state.config;
}

namespace {

std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[domain]\n"
     << "type = " << c.domain_type << "\n"
     << "cells = " << c.cells << "\n"
     << "levels = " << c.levels << "\n\n";
  os << "[problem]\n"
     << "p1 = " << fmt(c.p1) << "\nq1 = " << fmt(c.q1) << "\np2 = " << fmt(c.p2)
     << "\nq2 = " << fmt(c.q2) << "\nmu1 = " << fmt(c.mu1) << "\nmu2 = " << fmt(c.mu2) << "\n\n";
  os << "[reactions]\n"
     << "type = " << c.reaction_type << "\n"
     << "alpha1 = " << fmt(c.alpha1) << "\nalpha2 = " << fmt(c.alpha2) << "\nbeta1 = " << fmt(c.beta1)
     << "\nbeta2 = " << fmt(c.beta2) << "\nh1 = " << c.h1 << "\nh2 = " << c.h2 << "\n";
  if (!c.f1_expr.empty()) os << "f1 = " << c.f1_expr << "\n";
  if (!c.f2_expr.empty()) os << "f2 = " << c.f2_expr << "\n";
  os << "\n[hypotheses]\n"
     << "c1 = " << fmt(c.c1) << "\nc2 = " << fmt(c.c2) << "\nd1 = " << fmt(c.d1)
     << "\nd2 = " << fmt(c.d2) << "\nC1 = " << fmt(c.C1) << "\nC2 = " << fmt(c.C2)
     << "\nsigma1 = " << c.sigma1 << "\nsigma2 = " << c.sigma2 << "\ngamma1 = " << c.gamma1
     << "\ngamma2 = " << c.gamma2 << "\n";
  auto opt = [&os](const char* key, const std::optional<Real>& v) {
    if (v) os << key << " = " << fmt(*v) << "\n";
  };
  opt("D1", c.D1);
  opt("D2", c.D2);
  opt("r1", c.r1);
  opt("s1", c.s1);
  opt("r2", c.r2);
  opt("s2", c.s2);
  os << "samples = " << c.samples << "\nmax_magnitude = " << fmt(c.max_magnitude) << "\n\n";
  os << "[solver]\n"
     << "tol = " << fmt(c.tol) << "\nnewton_max_iterations = " << c.newton_max_iterations
     << "\neps_stages = " << c.eps_stages << "\neps_start = " << fmt(c.eps_start)
     << "\neps_end = " << fmt(c.eps_end)
     << "\noverride_hypotheses = " << (c.override_hypotheses ? "true" : "false")
     << "\ninit = " << c.init << "\n\n";
  os << "[eigen]\n"
     << "r = " << fmt(c.eigen_r) << "\ntol = " << fmt(c.eigen_tol)
     << "\nmax_iterations = " << c.eigen_max_iterations << "\nlevel_cap = " << c.eigen_level_cap
     << "\n\n";
  os << "[probe]\n"
     << "mu = " << fmt(c.probe_mu) << "\npoints = " << c.probe_points << "\n\n";
  os << "[output]\ndirectory = " << c.output_directory << "\n\n";
  os << "[run]\nseed = " << c.seed << "\n";
  return os.str();
}

BuiltProblem build_problem(const RunConfig& config, const Mesh& base_mesh) {
  BuiltProblem built;
  built.spec.p1 = config.p1;
  built.spec.q1 = config.q1;
  built.spec.p2 = config.p2;
  built.spec.q2 = config.q2;
  built.spec.mu1 = config.mu1;
  built.spec.mu2 = config.mu2;
  built.spec.validate();

  if (config.reaction_type == "example44") {
    ExampleReactionParams params;
    params.alpha1 = config.alpha1;
    params.alpha2 = config.alpha2;
    params.beta1 = config.beta1;
    params.beta2 = config.beta2;
    params.h1 = ScalarField::from_expression(config.h1);
    params.h2 = ScalarField::from_expression(config.h2);
    params.c1 = config.c1;
    params.c2 = config.c2;
    params.d1 = config.d1;
    params.d2 = config.d2;
    params.slack_magnitude = config.max_magnitude;
    ExampleReactions ex = build_example_reactions(params, built.spec, base_mesh);
    built.spec.f1 = ex.f1;
    built.spec.f2 = ex.f2;
    built.constants = ex.constants;
  } else {
    built.spec.f1 = Reaction::from_expression(config.f1_expr);
    built.spec.f2 = Reaction::from_expression(config.f2_expr);
    built.constants.C1 = config.C1;
    built.constants.C2 = config.C2;
    built.constants.sigma1 = ScalarField::from_expression(config.sigma1);
    built.constants.sigma2 = ScalarField::from_expression(config.sigma2);
    built.constants.c1 = config.c1;
    built.constants.c2 = config.c2;
    built.constants.d1 = config.d1;
    built.constants.d2 = config.d2;
    built.constants.gamma1 = ScalarField::from_expression(config.gamma1);
    built.constants.gamma2 = ScalarField::from_expression(config.gamma2);
    const QuadratureRule& quad = default_quadrature();
    auto l1 = [&](const ScalarField& f) {
      Real total = 0.0;
      for (int t = 0; t < base_mesh.num_triangles(); ++t) {
        const Vec2 a = base_mesh.vertex(base_mesh.triangles(t, 0));
        const Vec2 b = base_mesh.vertex(base_mesh.triangles(t, 1));
        const Vec2 cc = base_mesh.vertex(base_mesh.triangles(t, 2));
        for (int q = 0; q < quad.num_points(); ++q) {
          const Vec2 xq = quad.barycentric(q, 0) * a + quad.barycentric(q, 1) * b +
                          quad.barycentric(q, 2) * cc;
          total += 2.0 * base_mesh.element_area(t) * quad.weights(q) * std::abs(f(xq.x(), xq.y()));
        }
      }
      return total;
    };
    built.constants.gamma1_l1 = l1(built.constants.gamma1);
    built.constants.gamma2_l1 = l1(built.constants.gamma2);
  }
  built.constants.D1 = config.D1;
  built.constants.D2 = config.D2;
  built.constants.r1 = config.r1;
  built.constants.s1 = config.s1;
  built.constants.r2 = config.r2;
  built.constants.s2 = config.s2;
  return built;
}

SolverOptions solver_options(const RunConfig& config) {
  SolverOptions opts;
  opts.tol = config.tol;
  opts.newton_max_iterations = config.newton_max_iterations;
  opts.eps_stages = config.eps_stages;
  opts.eps_start = config.eps_start;
  opts.eps_end = config.eps_end;
  return opts;
}

HierarchyControls hierarchy_controls(const RunConfig& config, const Mesh& base_mesh) {
  HierarchyControls controls;
  controls.solver = solver_options(config);
  controls.constants = build_problem(config, base_mesh).constants;
  controls.override_hypotheses = config.override_hypotheses;
  controls.check_samples = config.samples;
  controls.check_max_magnitude = config.max_magnitude;
  controls.seed = config.seed;
  controls.eigen_level_cap = config.eigen_level_cap;
  controls.eigen_tol = config.eigen_tol;
  controls.initial_iterate = config.init == "zero" ? InitialIterate::Zero : InitialIterate::Sine;
  return controls;
}

}  // namespace pqsys
