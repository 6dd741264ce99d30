#include "pqsys/example_reactions.hpp"

#include <cmath>
#include <cstdio>

namespace pqsys {

namespace {

/// |z|^{a-2} z evaluated safely at z = 0 (limit 0 for a > 1, and 0 by
/// convention at the a = 1 endpoint).
Real odd_power(Real z, Real a) {
  if (z == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(z), a - 1.0), z);
}

Real integral_abs(const Mesh& mesh, const ScalarField& field) {
  const QuadratureRule& quad = default_quadrature();
  Real total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 a = mesh.vertex(mesh.triangles(t, 0));
    const Vec2 b = mesh.vertex(mesh.triangles(t, 1));
    const Vec2 c = mesh.vertex(mesh.triangles(t, 2));
    Real local = 0.0;
    for (int q = 0; q < quad.num_points(); ++q) {
      const Vec2 xq = quad.barycentric(q, 0) * a + quad.barycentric(q, 1) * b +
                      quad.barycentric(q, 2) * c;
      local += quad.weights(q) * std::abs(field(xq.x(), xq.y()));
    }
    total += 2.0 * mesh.element_area(t) * local;
  }
  return total;
}

std::string compose_sigma_source(const ScalarField& h) {
  if (h.source == "0") return "3";
  return "abs(" + h.source + ")+3";
}

std::string compose_gamma_source(const ScalarField& h, Real chat) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", chat);
  if (h.source == "0") return buf;
  return "abs(" + h.source + ")+" + buf;
}

}  // namespace

Real young_slack(Real a, Real eps, Real b) {
  require(a > 0.0 && a < b && eps > 0.0, "young_slack: needs 0 < a < b and eps > 0");
  // Maximize z^a - eps z^b: stationary at z* = (a/(eps b))^{1/(b-a)}.
  return ((b - a) / b) * std::pow(a / (eps * b), a / (b - a));
}

namespace {

/// max over z in [0, zmax] of z^a - eps z^b. The gap increases up to the
/// stationary point z* = (a/(eps b))^{1/(b-a)}, so the range maximum is the
/// value at min(z*, zmax).
Real range_slack(Real a, Real eps, Real b, Real zmax) {
  const Real z_star = std::pow(a / (eps * b), 1.0 / (b - a));
  if (z_star <= zmax) return young_slack(a, eps, b);
  return std::pow(zmax, a) - eps * std::pow(zmax, b);
}

}  // namespace

ExampleReactions build_example_reactions(ExampleReactionParams params, const ProblemSpec& spec,
                                         const Mesh& mesh) {
  spec.validate();
  const Real p1 = spec.p1, p2 = spec.p2;
  const Real e1 = p2 / ProblemSpec::conjugate(spec.p1_star());  // t and nu exponent in f1
  const Real e2 = p1 / ProblemSpec::conjugate(spec.p2_star());  // s and xi exponent in f2
  const Real beta1_max = p1 / ProblemSpec::conjugate(spec.p1_star());
  const Real beta2_max = p2 / ProblemSpec::conjugate(spec.p2_star());
  if (params.beta1 <= 0.0) params.beta1 = 1.0 + 0.8 * (beta1_max - 1.0);
  if (params.beta2 <= 0.0) params.beta2 = 1.0 + 0.8 * (beta2_max - 1.0);

  require(params.alpha1 >= 1.0 && params.alpha1 < p1, "alpha1 must lie in [1, p1)");
  require(params.alpha2 >= 1.0 && params.alpha2 < p2, "alpha2 must lie in [1, p2)");
  require(params.beta1 >= 1.0 && params.beta1 < beta1_max, "beta1 must lie in [1, p1/(p1*)')");
  require(params.beta2 >= 1.0 && params.beta2 < beta2_max, "beta2 must lie in [1, p2/(p2*)')");
  require(params.c1 > 0.0 && params.c2 > 0.0 && params.d1 > 0.0 && params.d2 > 0.0,
          "coercivity budgets must be positive");

  ExampleReactions out;
  out.params = params;

  const ScalarField h1 = params.h1, h2 = params.h2;
  const Real alpha1 = params.alpha1, alpha2 = params.alpha2;
  const Real beta1 = params.beta1, beta2 = params.beta2;

  out.f1.evaluate = [alpha1, beta1, e1, h1](const Vec2& x, Real s, Real t, const Vec2& xi,
                                            const Vec2& nu) {
    const Real coupling = s / (s * s + 1.0);
    return odd_power(s, alpha1) +
           coupling * (std::pow(std::abs(t), e1) + std::pow(xi.norm(), beta1) +
                       std::pow(nu.norm(), e1) + h1(x.x(), x.y()));
  };
  out.f1.source = "example44/f1";

  out.f2.evaluate = [alpha2, beta2, e2, h2](const Vec2& x, Real s, Real t, const Vec2& xi,
                                            const Vec2& nu) {
    const Real coupling = t / (t * t + 1.0);
    return odd_power(t, alpha2) +
           coupling * (std::pow(std::abs(s), e2) + std::pow(xi.norm(), e2) +
                       std::pow(nu.norm(), beta2) + h2(x.x(), x.y()));
  };
  out.f2.source = "example44/f2";

  HypothesisConstants& k = out.constants;
  k.C1 = 1.0;
  k.C2 = 1.0;
  k.sigma1 = {[h1](Real x, Real y) { return std::abs(h1(x, y)) + 3.0; }, compose_sigma_source(h1)};
  k.sigma2 = {[h2](Real x, Real y) { return std::abs(h2(x, y)) + 3.0; }, compose_sigma_source(h2)};
  k.c1 = params.c1;
  k.c2 = params.c2;
  k.d1 = params.d1;
  k.d2 = params.d2;

  // Signed products: f1 s <= |s|^{alpha1} + |t|^{e1} + |xi|^{beta1} + |nu|^{e1} + |h1|,
  // each term majorized by its budget share plus the Young slack over the
  // audited magnitude range (5% beyond, so range-boundary samples keep a
  // strict margin).
  require(params.slack_magnitude > 0.0, "slack_magnitude must be positive");
  const Real zmax = 1.05 * params.slack_magnitude;
  const Real chat1 = range_slack(alpha1, params.d1, p1, zmax) + range_slack(e1, params.d1, p2, zmax) +
                     range_slack(beta1, params.c1, p1, zmax) + range_slack(e1, params.c1, p2, zmax);
  const Real chat2 = range_slack(e2, params.d2, p1, zmax) + range_slack(alpha2, params.d2, p2, zmax) +
                     range_slack(e2, params.c2, p1, zmax) + range_slack(beta2, params.c2, p2, zmax);

  k.gamma1 = {[h1, chat1](Real x, Real y) { return std::abs(h1(x, y)) + chat1; },
              compose_gamma_source(h1, chat1)};
  k.gamma2 = {[h2, chat2](Real x, Real y) { return std::abs(h2(x, y)) + chat2; },
              compose_gamma_source(h2, chat2)};
  k.gamma1_l1 = integral_abs(mesh, h1) + chat1 * mesh.domain_measure;
  k.gamma2_l1 = integral_abs(mesh, h2) + chat2 * mesh.domain_measure;
  return out;
}

}  // namespace pqsys
