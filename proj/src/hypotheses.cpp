#include "pqsys/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <tuple>

namespace pqsys {

namespace {

struct QuadPoints {
  std::vector<Vec2> points;
};

QuadPoints domain_points(const Mesh& mesh) {
  const QuadratureRule& quad = default_quadrature();
  QuadPoints qp;
  qp.points.reserve(static_cast<std::size_t>(mesh.num_triangles() * quad.num_points()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 a = mesh.vertex(mesh.triangles(t, 0));
    const Vec2 b = mesh.vertex(mesh.triangles(t, 1));
    const Vec2 c = mesh.vertex(mesh.triangles(t, 2));
    for (int q = 0; q < quad.num_points(); ++q)
      qp.points.push_back(quad.barycentric(q, 0) * a + quad.barycentric(q, 1) * b +
                          quad.barycentric(q, 2) * c);
  }
  return qp;
}

Real check_reaction_value(Real v, const SamplePoint& pt) {
  if (!std::isfinite(v)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "hypothesis check: non-finite reaction at x=(%.6g, %.6g), s=%.6g, t=%.6g",
                  pt.x.x(), pt.x.y(), pt.s, pt.t);
    fail(buf);
  }
  return v;
}

using BoundFn = std::function<std::pair<Real, Real>(const Reaction&, const Reaction&,
                                                    const SamplePoint&)>;

CheckReport run_check(const std::string& id, const Reaction& f1, const Reaction& f2,
                      const SamplingPlan& plan, const BoundFn& both_sides_eq1,
                      const BoundFn& both_sides_eq2) {
  CheckReport report;
  report.hypothesis = id;
  const std::vector<SamplePoint> samples = build_samples(plan);
  report.samples_tested = static_cast<long>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SamplePoint& pt = samples[i];
    const auto [lhs1, rhs1] = both_sides_eq1(f1, f2, pt);
    if (lhs1 > rhs1) {
      Violation v{static_cast<long>(i), pt.x, pt.s, pt.t, pt.xi, pt.nu, lhs1, rhs1, 1};
      report.violations.push_back(v);
    }
    const auto [lhs2, rhs2] = both_sides_eq2(f1, f2, pt);
    if (lhs2 > rhs2) {
      Violation v{static_cast<long>(i), pt.x, pt.s, pt.t, pt.xi, pt.nu, lhs2, rhs2, 2};
      report.violations.push_back(v);
    }
  }
  report.passed = report.violations.empty();
  return report;
}

}  // namespace

std::vector<SamplePoint> build_samples(const SamplingPlan& plan) {
  require(plan.domain_mesh != nullptr, "sampling plan needs a domain mesh");
  require(plan.n_samples > 0, "sampling plan needs a positive sample count");
  const QuadPoints qp = domain_points(*plan.domain_mesh);
  Rng rng(plan.seed);
  const Real log_lo = std::log(1e-4);
  const Real log_hi = std::log(plan.max_magnitude);

  auto magnitude = [&]() { return std::exp(rng.uniform(log_lo, log_hi)); };
  auto direction = [&]() {
    const Real theta = rng.uniform(0.0, 2.0 * M_PI);
    return Vec2(std::cos(theta), std::sin(theta));
  };

  std::vector<SamplePoint> samples;
  samples.reserve(static_cast<std::size_t>(plan.n_samples));
  for (long i = 0; i < plan.n_samples; ++i) {
    SamplePoint pt;
    pt.x = qp.points[static_cast<std::size_t>(i) % qp.points.size()];
    // Occasionally pin arguments to zero so degenerate slots get exercised.
    pt.s = (rng.uniform() < 0.05) ? 0.0 : (rng.uniform() < 0.5 ? -1.0 : 1.0) * magnitude();
    pt.t = (rng.uniform() < 0.05) ? 0.0 : (rng.uniform() < 0.5 ? -1.0 : 1.0) * magnitude();
    pt.xi = (rng.uniform() < 0.05) ? Vec2::Zero().eval() : (magnitude() * direction()).eval();
    pt.nu = (rng.uniform() < 0.05) ? Vec2::Zero().eval() : (magnitude() * direction()).eval();
    samples.push_back(pt);
  }
  return samples;
}

CheckReport check_H1(const Reaction& f1, const Reaction& f2, const ProblemSpec& spec,
                     const HypothesisConstants& constants, const SamplingPlan& plan) {
  const Real p1s = spec.p1_star(), p2s = spec.p2_star();
  const Real c1p = ProblemSpec::conjugate(p1s), c2p = ProblemSpec::conjugate(p2s);
  auto eq1 = [&](const Reaction& a, const Reaction&, const SamplePoint& pt) {
    const Real lhs = std::abs(check_reaction_value(a.evaluate(pt.x, pt.s, pt.t, pt.xi, pt.nu), pt));
    const Real rhs = constants.C1 * (std::pow(std::abs(pt.s), p1s - 1.0) +
                                     std::pow(std::abs(pt.t), p2s / c1p) +
                                     std::pow(pt.xi.norm(), spec.p1 / c1p) +
                                     std::pow(pt.nu.norm(), spec.p2 / c1p)) +
                     constants.sigma1(pt.x.x(), pt.x.y());
    return std::make_pair(lhs, rhs);
  };
  auto eq2 = [&](const Reaction&, const Reaction& b, const SamplePoint& pt) {
    const Real lhs = std::abs(check_reaction_value(b.evaluate(pt.x, pt.s, pt.t, pt.xi, pt.nu), pt));
    const Real rhs = constants.C2 * (std::pow(std::abs(pt.s), p1s / c2p) +
                                     std::pow(std::abs(pt.t), p2s - 1.0) +
                                     std::pow(pt.xi.norm(), spec.p1 / c2p) +
                                     std::pow(pt.nu.norm(), spec.p2 / c2p)) +
                     constants.sigma2(pt.x.x(), pt.x.y());
    return std::make_pair(lhs, rhs);
  };
  return run_check("H1", f1, f2, plan, eq1, eq2);
}

CheckReport check_H1prime(const Reaction& f1, const Reaction& f2, const ProblemSpec& spec,
                          const HypothesisConstants& constants, const SamplingPlan& plan) {
  require(constants.D1 && constants.D2 && constants.r1 && constants.r2,
          "check_H1prime: D_i and r_i constants are required");
  const Real p1s = spec.p1_star(), p2s = spec.p2_star();
  for (auto [r, ps, tag] : {std::tuple{*constants.r1, p1s, "r1"}, std::tuple{*constants.r2, p2s, "r2"}})
    require(r > 1.0 && r < ps, std::string(tag) + " must lie in (1, p_i*)");
  const Real rc1 = ProblemSpec::conjugate(*constants.r1);
  const Real rc2 = ProblemSpec::conjugate(*constants.r2);
  auto eq1 = [&](const Reaction& a, const Reaction&, const SamplePoint& pt) {
    const Real lhs = std::abs(check_reaction_value(a.evaluate(pt.x, pt.s, pt.t, pt.xi, pt.nu), pt));
    const Real rhs = *constants.D1 * (std::pow(std::abs(pt.s), p1s / rc1) +
                                      std::pow(std::abs(pt.t), p2s / rc1) +
                                      std::pow(pt.xi.norm(), spec.p1 / rc1) +
                                      std::pow(pt.nu.norm(), spec.p2 / rc1)) +
                     constants.sigma1(pt.x.x(), pt.x.y());
    return std::make_pair(lhs, rhs);
  };
  auto eq2 = [&](const Reaction&, const Reaction& b, const SamplePoint& pt) {
    const Real lhs = std::abs(check_reaction_value(b.evaluate(pt.x, pt.s, pt.t, pt.xi, pt.nu), pt));
    const Real rhs = *constants.D2 * (std::pow(std::abs(pt.s), p1s / rc2) +
                                      std::pow(std::abs(pt.t), p2s / rc2) +
                                      std::pow(pt.xi.norm(), spec.p1 / rc2) +
                                      std::pow(pt.nu.norm(), spec.p2 / rc2)) +
                     constants.sigma2(pt.x.x(), pt.x.y());
    return std::make_pair(lhs, rhs);
  };
  return run_check("H1'", f1, f2, plan, eq1, eq2);
}

CheckReport check_H2(const Reaction& f1, const Reaction& f2, const ProblemSpec& spec,
                     const HypothesisConstants& constants, const EigenEstimate& lambda_p1,
                     const EigenEstimate& lambda_p2, const SamplingPlan& plan,
                     Real lambda_drift) {
  const Real lambda_min = std::min(lambda_p1.lambda, lambda_p2.lambda);
  require(lambda_min > 0.0, "check_H2: eigenvalue estimates must be positive");
  auto eq1 = [&](const Reaction& a, const Reaction&, const SamplePoint& pt) {
    const Real lhs = check_reaction_value(a.evaluate(pt.x, pt.s, pt.t, pt.xi, pt.nu), pt) * pt.s;
    const Real rhs = constants.c1 * (std::pow(pt.xi.norm(), spec.p1) + std::pow(pt.nu.norm(), spec.p2)) +
                     constants.d1 * (std::pow(std::abs(pt.s), spec.p1) + std::pow(std::abs(pt.t), spec.p2)) +
                     constants.gamma1(pt.x.x(), pt.x.y());
    return std::make_pair(lhs, rhs);
  };
  auto eq2 = [&](const Reaction&, const Reaction& b, const SamplePoint& pt) {
    const Real lhs = check_reaction_value(b.evaluate(pt.x, pt.s, pt.t, pt.xi, pt.nu), pt) * pt.t;
    const Real rhs = constants.c2 * (std::pow(pt.xi.norm(), spec.p1) + std::pow(pt.nu.norm(), spec.p2)) +
                     constants.d2 * (std::pow(std::abs(pt.s), spec.p1) + std::pow(std::abs(pt.t), spec.p2)) +
                     constants.gamma2(pt.x.x(), pt.x.y());
    return std::make_pair(lhs, rhs);
  };
  CheckReport report = run_check("H2", f1, f2, plan, eq1, eq2);
  report.margin_seven =
      1.0 - (constants.c1 + constants.c2 + (constants.d1 + constants.d2) / lambda_min);
  report.passed = report.violations.empty() && *report.margin_seven > 0.0;
  report.conditional = report.passed && !(*report.margin_seven > 2.0 * lambda_drift);
  return report;
}

Real radius_worst_value(const ProblemSpec& spec, const HypothesisConstants& constants,
                        const EigenEstimate& lambda_p1, const EigenEstimate& lambda_p2,
                        Real domain_measure, Real R, int grid) {
  const Real dsum = constants.d1 + constants.d2;
  const Real csum = constants.c1 + constants.c2;
  const Real k1 = 1.0 - csum - dsum / lambda_p1.lambda;
  const Real k2 = 1.0 - csum - dsum / lambda_p2.lambda;
  const Real a1 = std::abs(spec.mu1) * std::pow(domain_measure, (spec.p1 - spec.q1) / spec.p1);
  const Real a2 = std::abs(spec.mu2) * std::pow(domain_measure, (spec.p2 - spec.q2) / spec.p2);
  const Real C = constants.gamma1_l1 + constants.gamma2_l1;
  Real worst = std::numeric_limits<Real>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const Real rho1 = R * static_cast<Real>(i) / static_cast<Real>(grid);
    const Real rho2 = R - rho1;
    const Real value = k1 * std::pow(rho1, spec.p1) + k2 * std::pow(rho2, spec.p2) -
                       a1 * std::pow(rho1, spec.q1) - a2 * std::pow(rho2, spec.q2) - C;
    worst = std::min(worst, value);
  }
  return worst;
}

Real apriori_radius(const ProblemSpec& spec, const HypothesisConstants& constants,
                    const EigenEstimate& lambda_p1, const EigenEstimate& lambda_p2,
                    Real domain_measure) {
  const Real lambda_min = std::min(lambda_p1.lambda, lambda_p2.lambda);
  const Real margin =
      1.0 - (constants.c1 + constants.c2 + (constants.d1 + constants.d2) / lambda_min);
  if (!(margin > 0.0)) fail("apriori_radius: hypothesis (7) violated");

  auto worst = [&](Real R) {
    return radius_worst_value(spec, constants, lambda_p1, lambda_p2, domain_measure, R);
  };

  constexpr Real r_floor = 1.0;
  Real lo = 1e-8;
  if (worst(lo) >= 0.0) {
    // No violated radius anywhere reachable: degenerate case, return the floor.
    return r_floor;
  }
  Real hi = lo;
  int doubling = 0;
  while (worst(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doubling > 200) fail("apriori_radius: no admissible radius found");
  }
  while (hi - lo > 1e-10 * hi) {
    const Real mid = 0.5 * (lo + hi);
    (worst(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace pqsys
