#include "pqsys/example_reactions.hpp"
#include "pqsys/reactions.hpp"

#include <doctest.h>

#include <cmath>

using namespace pqsys;

TEST_SUITE_BEGIN("reactions");

namespace {

ExampleReactions default_family() {
  ProblemSpec spec;  // p1=1.8 q1=1.3 p2=1.7 q2=1.2
  return build_example_reactions(ExampleReactionParams{}, spec, generate_unit_square(2));
}

}  // namespace

TEST_CASE("family vanishes at the origin and hits the hand value at s=1") {
  const ExampleReactions ex = default_family();
  const Vec2 x(0.3, 0.4), zero2 = Vec2::Zero();
  CHECK(ex.f1.evaluate(x, 0, 0, zero2, zero2) == 0.0);
  CHECK(ex.f2.evaluate(x, 0, 0, zero2, zero2) == 0.0);
  // alpha1 = 1.5, h1 = 0: f1(1, 0, 0, 0) = |1|^{-0.5} * 1 + (1/2) * 0 = 1
  CHECK(ex.f1.evaluate(x, 1.0, 0, zero2, zero2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("first term is odd in s") {
  const ExampleReactions ex = default_family();
  const Vec2 x(0.25, 0.5), zero2 = Vec2::Zero();
  const Real plus = ex.f1.evaluate(x, 2.0, 0, zero2, zero2);
  const Real minus = ex.f1.evaluate(x, -2.0, 0, zero2, zero2);
  CHECK(plus == doctest::Approx(-minus).epsilon(1e-12));
}

TEST_CASE("coupling factor stays within [-1/2, 1/2]") {
  for (Real s : {-100.0, -1.0, -0.5, 0.0, 0.3, 1.0, 7.0, 1e6}) {
    CHECK(std::abs(s / (s * s + 1.0)) <= 0.5 + 1e-15);
  }
}

TEST_CASE("parameter invariants are enforced") {
  ProblemSpec spec;
  const Mesh mesh = generate_unit_square(1);
  ExampleReactionParams bad;
  bad.alpha1 = 1.9;  // >= p1 = 1.8
  CHECK_THROWS(build_example_reactions(bad, spec, mesh));
  bad = ExampleReactionParams{};
  bad.beta1 = 1.75;  // >= p1/(p1*)' = 1.7
  CHECK_THROWS(build_example_reactions(bad, spec, mesh));
  bad = ExampleReactionParams{};
  bad.alpha2 = 0.9;  // < 1
  CHECK_THROWS(build_example_reactions(bad, spec, mesh));
}

TEST_CASE("emitted constants: C_i = 1, sigma_i = |h_i| + 3, gammas positive") {
  ProblemSpec spec;
  ExampleReactionParams params;
  params.h1 = ScalarField::from_expression("x");
  const ExampleReactions ex = build_example_reactions(params, spec, generate_unit_square(2));
  CHECK(ex.constants.C1 == 1.0);
  CHECK(ex.constants.C2 == 1.0);
  CHECK(ex.constants.sigma1(0.25, 0.5) == doctest::Approx(3.25));
  CHECK(ex.constants.sigma2(0.25, 0.5) == doctest::Approx(3.0));
  CHECK(ex.constants.gamma1(0.5, 0.5) > 0.0);
  CHECK(ex.constants.gamma1_l1 > 0.0);
  CHECK(ex.constants.gamma2_l1 > 0.0);
}

TEST_CASE("finite differences: polynomial derivative") {
  Reaction r;
  r.evaluate = [](const Vec2&, Real s, Real, const Vec2&, const Vec2&) { return s * s; };
  const Reaction with = finite_difference_partials(r);
  const Vec2 x(0.1, 0.1), zero2 = Vec2::Zero();
  CHECK(with.partials->ds(x, 3.0, 0, zero2, zero2) == doctest::Approx(6.0).epsilon(1e-5));
}

TEST_CASE("finite differences: family dt matches the analytic factor derivative") {
  const ExampleReactions ex = default_family();
  const Reaction with = finite_difference_partials(ex.f1);
  ProblemSpec spec;
  const Real e1 = spec.p2 / ProblemSpec::conjugate(spec.p1_star());
  const Vec2 x(0.3, 0.7);
  const Vec2 xi(0.2, -0.1), nu(0.4, 0.3);
  const Real s = 1.7, t = 2.3;
  const Real analytic = s / (s * s + 1.0) * e1 * std::pow(std::abs(t), e1 - 1.0);
  CHECK(with.partials->dt(x, s, t, xi, nu) == doctest::Approx(analytic).epsilon(1e-4));
}

TEST_CASE("finite differences: constant reaction has zero partials") {
  Reaction r;
  r.evaluate = [](const Vec2&, Real, Real, const Vec2&, const Vec2&) { return 4.25; };
  const Reaction with = finite_difference_partials(r);
  const Vec2 x(0.4, 0.6), xi(1.0, 2.0), nu(-1.0, 0.5);
  CHECK(std::abs(with.partials->ds(x, 1.0, 2.0, xi, nu)) <= 1e-9);
  CHECK(std::abs(with.partials->dt(x, 1.0, 2.0, xi, nu)) <= 1e-9);
  CHECK(with.partials->dxi(x, 1.0, 2.0, xi, nu).norm() <= 1e-9);
  CHECK(with.partials->dnu(x, 1.0, 2.0, xi, nu).norm() <= 1e-9);
}

TEST_CASE("expression-backed reactions") {
  const Reaction r = Reaction::from_expression("s*t + xi1 - 2*nu2 + x");
  const Vec2 x(0.5, 0.0), xi(3.0, 0.0), nu(0.0, 1.0);
  CHECK(r.evaluate(x, 2.0, 4.0, xi, nu) == doctest::Approx(8.0 + 3.0 - 2.0 + 0.5));
}

TEST_CASE("young slack is a true majorant constant") {
  // z^a <= eps z^b + young_slack(a, eps, b) on a wide sample of z
  for (auto [a, eps, b] : {std::tuple{1.5, 0.05, 1.8}, {1.0, 0.1, 1.7}, {1.36, 0.02, 1.8}}) {
    const Real K = young_slack(a, eps, b);
    for (Real z = 0.0; z < 1e6; z = z * 1.7 + 0.1)
      CHECK(std::pow(z, a) <= eps * std::pow(z, b) + K * (1 + 1e-12));
  }
}

TEST_SUITE_END();
