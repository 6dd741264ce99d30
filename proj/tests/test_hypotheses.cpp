#include "pqsys/hypotheses.hpp"

#include "pqsys/example_reactions.hpp"

#include <doctest.h>

#include <cmath>

using namespace pqsys;

TEST_SUITE_BEGIN("hypotheses");

namespace {

EigenEstimate fake_lambda(Real value, Real r = 1.8, int level = 3) {
  EigenEstimate est;
  est.r = r;
  est.level = level;
  est.lambda = value;
  return est;
}

SamplingPlan small_plan(const Mesh& mesh, long n = 20000) {
  SamplingPlan plan;
  plan.domain_mesh = &mesh;
  plan.n_samples = n;
  return plan;
}

struct Family {
  Mesh mesh = generate_unit_square(2);
  ProblemSpec spec;
  ExampleReactions ex;
  Family() { ex = build_example_reactions(ExampleReactionParams{}, spec, mesh); }
};

}  // namespace

TEST_CASE("sample stream is deterministic and covers magnitudes") {
  const Mesh mesh = generate_unit_square(2);
  SamplingPlan plan = small_plan(mesh, 5000);
  const auto a = build_samples(plan);
  const auto b = build_samples(plan);
  REQUIRE(a.size() == 5000);
  bool identical = true;
  Real max_s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    identical = identical && a[i].s == b[i].s && a[i].x == b[i].x && a[i].xi == b[i].xi;
    max_s = std::max(max_s, std::abs(a[i].s));
  }
  CHECK(identical);
  CHECK(max_s > 1e3);          // log shells reach large magnitudes
  CHECK(max_s <= plan.max_magnitude);
}

TEST_CASE("H1: zero reaction with zero sigma passes") {
  const Mesh mesh = generate_unit_square(2);
  ProblemSpec spec;
  HypothesisConstants constants;
  constants.C1 = 0.5;
  constants.C2 = 0.5;
  const CheckReport report =
      check_H1(Reaction::zero(), Reaction::zero(), spec, constants, small_plan(mesh, 5000));
  CHECK(report.passed);
  CHECK(report.violations.empty());
  CHECK(report.samples_tested == 5000);
  CHECK(!report.margin_seven.has_value());
}

TEST_CASE("H1: the family passes with C_i = 1 and sigma_i = |h_i| + 3") {
  Family fam;
  const CheckReport report =
      check_H1(fam.ex.f1, fam.ex.f2, fam.spec, fam.ex.constants, small_plan(fam.mesh));
  CHECK(report.passed);
  CHECK(report.violations.empty());
}

TEST_CASE("H1: an over-critical exponent is caught with a recorded violation") {
  Family fam;
  Reaction too_fast;
  const Real p1s = fam.spec.p1_star();
  too_fast.evaluate = [p1s](const Vec2&, Real s, Real, const Vec2&, const Vec2&) {
    return std::pow(std::abs(s), p1s);  // one power above the admissible growth
  };
  const CheckReport report =
      check_H1(too_fast, Reaction::zero(), fam.spec, fam.ex.constants, small_plan(fam.mesh));
  CHECK(!report.passed);
  REQUIRE(!report.violations.empty());
  const Violation& v = report.violations.front();
  CHECK(v.lhs > v.rhs);
  CHECK(v.equation == 1);
}

TEST_CASE("H1': constant reaction with matching sigma passes") {
  const Mesh mesh = generate_unit_square(2);
  ProblemSpec spec;
  Reaction kappa;
  kappa.evaluate = [](const Vec2&, Real, Real, const Vec2&, const Vec2&) { return 2.5; };
  HypothesisConstants constants;
  constants.D1 = 1.0;
  constants.D2 = 1.0;
  constants.r1 = 0.5 * (1.0 + spec.p1_star());
  constants.r2 = 0.5 * (1.0 + spec.p2_star());
  constants.sigma1 = ScalarField::constant(2.5);
  constants.sigma2 = ScalarField::constant(2.5);
  const CheckReport report = check_H1prime(kappa, kappa, spec, constants, small_plan(mesh, 5000));
  CHECK(report.passed);
}

TEST_CASE("H1': family passes with exponents inside the windows, and implies H1") {
  Family fam;
  HypothesisConstants constants = fam.ex.constants;
  constants.D1 = 2.0;
  constants.D2 = 2.0;
  constants.r1 = 0.99 * fam.spec.p1_star();
  constants.r2 = 0.99 * fam.spec.p2_star();
  constants.sigma1 = ScalarField::constant(4.0);
  constants.sigma2 = ScalarField::constant(4.0);
  const SamplingPlan plan = small_plan(fam.mesh);
  const CheckReport strong = check_H1prime(fam.ex.f1, fam.ex.f2, fam.spec, constants, plan);
  CHECK(strong.passed);

  // The implication: a pass of the stronger bound yields an H1 pass with
  // C_i := D_i and sigma_i := sigma_i + 4 D_i on the same samples.
  HypothesisConstants weaker = constants;
  weaker.C1 = *constants.D1;
  weaker.C2 = *constants.D2;
  weaker.sigma1 = ScalarField::constant(4.0 + 4.0 * *constants.D1);
  weaker.sigma2 = ScalarField::constant(4.0 + 4.0 * *constants.D2);
  const CheckReport weak = check_H1(fam.ex.f1, fam.ex.f2, fam.spec, weaker, plan);
  CHECK(weak.passed);

  // violation case mirrors the H1 one
  Reaction too_fast;
  const Real p1s = fam.spec.p1_star();
  too_fast.evaluate = [p1s](const Vec2&, Real s, Real, const Vec2&, const Vec2&) {
    return std::pow(std::abs(s), p1s + 1.0);
  };
  CHECK(!check_H1prime(too_fast, Reaction::zero(), fam.spec, constants, plan).passed);

  HypothesisConstants missing;  // no D_i / r_i set
  CHECK_THROWS(check_H1prime(fam.ex.f1, fam.ex.f2, fam.spec, missing, plan));
}

TEST_CASE("H2: zero reactions with small budgets and the analytic reference margin") {
  const Mesh mesh = generate_unit_square(2);
  ProblemSpec spec;
  HypothesisConstants constants;
  constants.c1 = constants.c2 = 0.1;
  constants.d1 = constants.d2 = 0.1;
  const Real lambda = 2.0 * M_PI * M_PI;
  const CheckReport report =
      check_H2(Reaction::zero(), Reaction::zero(), spec, constants, fake_lambda(lambda),
               fake_lambda(lambda, 1.7), small_plan(mesh, 5000));
  CHECK(report.passed);
  const Real expected = 1.0 - (0.2 + 0.2 / lambda);
  CHECK(*report.margin_seven == doctest::Approx(expected).epsilon(1e-12));
  CHECK(*report.margin_seven == doctest::Approx(0.790).epsilon(1e-3));
}

TEST_CASE("H2: the family passes with the emitted gamma_i") {
  Family fam;
  const CheckReport report =
      check_H2(fam.ex.f1, fam.ex.f2, fam.spec, fam.ex.constants, fake_lambda(15.3),
               fake_lambda(13.4, 1.7), small_plan(fam.mesh));
  CHECK(report.passed);
  CHECK(report.violations.empty());
}

TEST_CASE("H2: budgets exceeding one fail regardless of samples") {
  Family fam;
  HypothesisConstants constants = fam.ex.constants;
  constants.c1 = constants.c2 = 0.6;
  const CheckReport report =
      check_H2(fam.ex.f1, fam.ex.f2, fam.spec, constants, fake_lambda(15.3),
               fake_lambda(13.4, 1.7), small_plan(fam.mesh, 2000));
  CHECK(*report.margin_seven < 0.0);
  CHECK(!report.passed);
}

TEST_CASE("H2: margin decreases strictly in each budget") {
  Family fam;
  const auto margin_with = [&](Real c1, Real c2, Real d1, Real d2) {
    HypothesisConstants constants = fam.ex.constants;
    constants.c1 = c1;
    constants.c2 = c2;
    constants.d1 = d1;
    constants.d2 = d2;
    const CheckReport r = check_H2(Reaction::zero(), Reaction::zero(), fam.spec, constants,
                                   fake_lambda(15.3), fake_lambda(13.4, 1.7),
                                   small_plan(fam.mesh, 100));
    return *r.margin_seven;
  };
  const Real base = margin_with(0.05, 0.05, 0.05, 0.05);
  CHECK(margin_with(0.06, 0.05, 0.05, 0.05) < base);
  CHECK(margin_with(0.05, 0.06, 0.05, 0.05) < base);
  CHECK(margin_with(0.05, 0.05, 0.06, 0.05) < base);
  CHECK(margin_with(0.05, 0.05, 0.05, 0.06) < base);
}

TEST_CASE("H2: conditional flag reflects the eigenvalue drift") {
  Family fam;
  const SamplingPlan plan = small_plan(fam.mesh, 100);
  const CheckReport solid = check_H2(Reaction::zero(), Reaction::zero(), fam.spec,
                                     fam.ex.constants, fake_lambda(15.3),
                                     fake_lambda(13.4, 1.7), plan, 0.01);
  CHECK(solid.passed);
  CHECK(!solid.conditional);
  const CheckReport shaky = check_H2(Reaction::zero(), Reaction::zero(), fam.spec,
                                     fam.ex.constants, fake_lambda(15.3),
                                     fake_lambda(13.4, 1.7), plan, 0.45);
  CHECK(shaky.passed);
  CHECK(shaky.conditional);
}

TEST_CASE("non-finite reactions are reported") {
  Family fam;
  Reaction bad;
  bad.evaluate = [](const Vec2&, Real s, Real, const Vec2&, const Vec2&) {
    return s > 100.0 ? std::numeric_limits<Real>::infinity() : 0.0;
  };
  CHECK_THROWS_WITH_AS(
      check_H1(bad, Reaction::zero(), fam.spec, fam.ex.constants, small_plan(fam.mesh, 5000)),
      doctest::Contains("non-finite reaction"), std::runtime_error);
}

TEST_CASE("radius: degenerate case returns the floor") {
  ProblemSpec spec;  // mu = 0
  HypothesisConstants constants;  // gamma_l1 = 0
  const Real R = apriori_radius(spec, constants, fake_lambda(15.3), fake_lambda(13.4, 1.7), 1.0);
  CHECK(R == 1.0);
}

TEST_CASE("radius: symmetric analytic case matches 2 (C/k)^{1/p} within 0.1%") {
  ProblemSpec spec;
  spec.p1 = spec.p2 = 1.8;
  spec.q1 = spec.q2 = 1.3;
  spec.mu1 = spec.mu2 = 0.0;
  HypothesisConstants constants;
  constants.c1 = constants.c2 = 0.05;
  constants.d1 = constants.d2 = 0.05;
  constants.gamma1_l1 = 1.7;
  constants.gamma2_l1 = 2.3;
  const Real lambda = 12.0;
  const Real k = 1.0 - constants.c1 - constants.c2 - (constants.d1 + constants.d2) / lambda;
  const Real C = constants.gamma1_l1 + constants.gamma2_l1;
  // worst split is the even one: 2 k (R/2)^p - C = 0 at R = 2 (C/(2k))^{1/p}
  const Real expected = 2.0 * std::pow(C / (2.0 * k), 1.0 / spec.p1);
  const Real R = apriori_radius(spec, constants, fake_lambda(lambda), fake_lambda(lambda, 1.8), 1.0);
  CHECK(std::abs(R - expected) / expected <= 1e-3);
}

TEST_CASE("radius: grid-scan minimality on random parameter sets") {
  Rng rng(77);
  for (int rep = 0; rep < 5; ++rep) {
    ProblemSpec spec;
    spec.p1 = rng.uniform(1.4, 1.9);
    spec.q1 = rng.uniform(1.05, spec.p1 - 0.1);
    spec.p2 = rng.uniform(1.4, 1.9);
    spec.q2 = rng.uniform(1.05, spec.p2 - 0.1);
    spec.mu1 = rng.uniform(-1.0, 1.0);
    spec.mu2 = rng.uniform(-1.0, 1.0);
    HypothesisConstants constants;
    constants.c1 = rng.uniform(0.01, 0.2);
    constants.c2 = rng.uniform(0.01, 0.2);
    constants.d1 = rng.uniform(0.01, 0.2);
    constants.d2 = rng.uniform(0.01, 0.2);
    constants.gamma1_l1 = rng.uniform(0.5, 5.0);
    constants.gamma2_l1 = rng.uniform(0.5, 5.0);
    const EigenEstimate l1 = fake_lambda(rng.uniform(8.0, 25.0));
    const EigenEstimate l2 = fake_lambda(rng.uniform(8.0, 25.0), 1.7);
    const Real R = apriori_radius(spec, constants, l1, l2, 1.0);
    CHECK(radius_worst_value(spec, constants, l1, l2, 1.0, R) >= 0.0);
    CHECK(radius_worst_value(spec, constants, l1, l2, 1.0, 0.99 * R) < 0.0);
  }
}

TEST_CASE("radius: monotone in |mu_i| and in C") {
  ProblemSpec spec;
  HypothesisConstants constants;
  constants.gamma1_l1 = 1.0;
  constants.gamma2_l1 = 1.0;
  const EigenEstimate l1 = fake_lambda(15.0), l2 = fake_lambda(13.0, 1.7);
  Real previous = 0.0;
  for (Real mu : {0.0, 0.3, 0.8, 2.0}) {
    spec.mu1 = mu;
    spec.mu2 = -mu;
    const Real R = apriori_radius(spec, constants, l1, l2, 1.0);
    CHECK(R >= previous - 1e-9);
    previous = R;
  }
  spec.mu1 = spec.mu2 = 0.5;
  previous = 0.0;
  for (Real c : {0.5, 1.0, 3.0, 9.0}) {
    constants.gamma1_l1 = c;
    constants.gamma2_l1 = c;
    const Real R = apriori_radius(spec, constants, l1, l2, 1.0);
    CHECK(R >= previous - 1e-9);
    previous = R;
  }
}

TEST_CASE("radius: violated margin inequality is an error") {
  ProblemSpec spec;
  HypothesisConstants constants;
  constants.c1 = constants.c2 = 0.6;
  CHECK_THROWS_WITH_AS(
      apriori_radius(spec, constants, fake_lambda(15.0), fake_lambda(13.0, 1.7), 1.0),
      doctest::Contains("hypothesis (7) violated"), std::runtime_error);
}

TEST_SUITE_END();
