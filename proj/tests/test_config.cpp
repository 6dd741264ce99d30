#include "pqsys/config.hpp"

#include <doctest.h>

using namespace pqsys;

TEST_SUITE_BEGIN("config");

TEST_CASE("empty text yields the documented defaults") {
  const RunConfig config = parse_config("");
  CHECK(config.p1 == 1.8);
  CHECK(config.q1 == 1.3);
  CHECK(config.p2 == 1.7);
  CHECK(config.q2 == 1.2);
  CHECK(config.tol == 1e-8);
  CHECK(config.levels == 4);
  CHECK(config.reaction_type == "example44");
  CHECK(config.samples == 100000);
  CHECK(config.seed == 42);
}

TEST_CASE("keys parse and sections apply") {
  const RunConfig config = parse_config(
      "[problem]\n"
      "p1 = 1.9\n"
      "mu1 = -0.25\n"
      "[solver]\n"
      "tol = 1e-10\n"
      "override_hypotheses = true\n"
      "[run]\n"
      "seed = 7\n");
  CHECK(config.p1 == 1.9);
  CHECK(config.mu1 == -0.25);
  CHECK(config.tol == 1e-10);
  CHECK(config.override_hypotheses);
  CHECK(config.seed == 7);
}

TEST_CASE("constraint violations cite the broken hypothesis with positions") {
  try {
    parse_config("[problem]\np1 = 2.5\n");
    CHECK(false);
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("p1 >= 2 violates p_i < N = 2") != std::string::npos);
    CHECK(err.line == 2);
  }
  CHECK_THROWS_AS(parse_config("[problem]\nq1 = 1.9\n"), ConfigError);  // q1 >= p1
  CHECK_THROWS_AS(parse_config("[problem]\nq2 = 0.9\n"), ConfigError);  // q2 <= 1
}

TEST_CASE("unknown sections and keys are rejected with positions") {
  try {
    parse_config("[problem]\nbogus = 1\n");
    CHECK(false);
  } catch (const ConfigError& err) {
    CHECK(err.line == 2);
    CHECK(std::string(err.what()).find("unknown key 'bogus'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nonsense]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("p1 = 1.5\n"), ConfigError);        // key outside a section
  CHECK_THROWS_AS(parse_config("[problem]\np1 : 2\n"), ConfigError);  // missing '='
  CHECK_THROWS_AS(parse_config("[problem]\np1 = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[reactions]\nh1 = pow(1)\n"), ConfigError);  // bad expression
}

TEST_CASE("expression reactions require both formulas") {
  CHECK_THROWS_AS(parse_config("[reactions]\ntype = expression\n"), ConfigError);
  const RunConfig ok = parse_config(
      "[reactions]\ntype = expression\nf1 = s + xi1\nf2 = t - nu2\n");
  CHECK(ok.f1_expr == "s + xi1");
}

TEST_CASE("serialize/parse round trip on random valid configs") {
  Rng rng(4242);
  for (int rep = 0; rep < 100; ++rep) {
    RunConfig config;
    config.cells = rng.uniform_int(1, 4);
    config.levels = rng.uniform_int(2, 6);
    config.p1 = rng.uniform(1.3, 1.95);
    config.q1 = rng.uniform(1.01, config.p1 - 0.05);
    config.p2 = rng.uniform(1.3, 1.95);
    config.q2 = rng.uniform(1.01, config.p2 - 0.05);
    config.mu1 = rng.uniform(-2.0, 2.0);
    config.mu2 = rng.uniform(-2.0, 2.0);
    config.alpha1 = rng.uniform(1.0, config.p1 - 0.01);
    config.alpha2 = rng.uniform(1.0, config.p2 - 0.01);
    config.c1 = rng.uniform(0.01, 0.3);
    config.d2 = rng.uniform(0.01, 0.3);
    config.tol = std::pow(10.0, -rng.uniform(6.0, 12.0));
    config.seed = rng.next_u64() % 100000;
    config.samples = 1000 + rng.uniform_int(0, 1000);
    config.h1 = "abs(x)+1";
    config.sigma1 = "3*y";
    if (rng.uniform() < 0.5) {
      config.D1 = rng.uniform(0.5, 3.0);
      config.D2 = rng.uniform(0.5, 3.0);
      config.r1 = rng.uniform(1.1, 2.0);
      config.r2 = rng.uniform(1.1, 2.0);
    }
    if (rng.uniform() < 0.3) {
      config.reaction_type = "expression";
      config.f1_expr = "s*t + xi1";
      config.f2_expr = "cos(x) - nu2";
    }
    const RunConfig reparsed = parse_config(serialize_config(config));
    CHECK(reparsed == config);
  }
}

TEST_CASE("build_problem wires the reaction family and constants") {
  const Mesh mesh = generate_unit_square(2);
  RunConfig config;
  const BuiltProblem built = build_problem(config, mesh);
  CHECK(built.spec.p1 == config.p1);
  CHECK(built.constants.C1 == 1.0);
  CHECK(built.constants.sigma1(0.5, 0.5) == doctest::Approx(3.0));
  CHECK(built.constants.gamma1_l1 > 0.0);
  const Vec2 x(0.5, 0.5), zero2 = Vec2::Zero();
  CHECK(built.spec.f1.evaluate(x, 1.0, 0.0, zero2, zero2) == doctest::Approx(1.0).epsilon(1e-13));

  RunConfig expr;
  expr.reaction_type = "expression";
  expr.f1_expr = "2*s";
  expr.f2_expr = "t";
  expr.gamma1 = "5";
  const BuiltProblem eb = build_problem(expr, mesh);
  CHECK(eb.spec.f1.evaluate(x, 3.0, 0.0, zero2, zero2) == 6.0);
  CHECK(eb.constants.gamma1_l1 == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_SUITE_END();
