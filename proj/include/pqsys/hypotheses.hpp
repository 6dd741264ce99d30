#pragma once

#include "pqsys/eigenvalue.hpp"
#include "pqsys/operators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pqsys {

/// Growth/coercivity constants of the three reaction hypotheses. The first
/// group bounds |f_i| by critical powers plus sigma_i; the optional second
/// group is the stronger variant with exponents divided by r_i'; the third
/// bounds the signed products f_1 s and f_2 t and must satisfy the margin
/// inequality c1 + c2 + (d1 + d2)/min(lambda_{1,p1}, lambda_{1,p2}) < 1.
struct HypothesisConstants {
  Real C1 = 1.0, C2 = 1.0;
  ScalarField sigma1 = ScalarField::zero();
  ScalarField sigma2 = ScalarField::zero();

  std::optional<Real> D1, D2, r1, s1, r2, s2;

  Real c1 = 0.05, c2 = 0.05, d1 = 0.05, d2 = 0.05;
  ScalarField gamma1 = ScalarField::zero();
  ScalarField gamma2 = ScalarField::zero();
  Real gamma1_l1 = 0.0, gamma2_l1 = 0.0;  // precomputed L1 norms over the domain
};

struct Violation {
  long sample_index = 0;
  Vec2 x = Vec2::Zero();
  Real s = 0.0, t = 0.0;
  Vec2 xi = Vec2::Zero(), nu = Vec2::Zero();
  Real lhs = 0.0, rhs = 0.0;
  int equation = 1;
};

struct CheckReport {
  std::string hypothesis;
  long samples_tested = 0;
  std::vector<Violation> violations;
  std::optional<Real> margin_seven;  // 1 - [c1+c2+(d1+d2)/min(lambda)], H2 only
  bool conditional = false;          // margin within 2x of the observed lambda drift
  bool passed = false;
};

/// Dense deterministic sampling of the domain x state x gradient arguments:
/// quadrature points of the given mesh crossed with log-spaced magnitude
/// shells (up to max_magnitude) and random directions.
struct SamplingPlan {
  const Mesh* domain_mesh = nullptr;
  long n_samples = 100000;
  Real max_magnitude = 1e4;
  std::uint64_t seed = 42;
};

struct SamplePoint {
  Vec2 x;
  Real s, t;
  Vec2 xi, nu;
};

/// Deterministic sample stream for the checkers (exposed for tests).
std::vector<SamplePoint> build_samples(const SamplingPlan& plan);

CheckReport check_H1(const Reaction& f1, const Reaction& f2, const ProblemSpec& spec,
                     const HypothesisConstants& constants, const SamplingPlan& plan);

CheckReport check_H1prime(const Reaction& f1, const Reaction& f2, const ProblemSpec& spec,
                          const HypothesisConstants& constants, const SamplingPlan& plan);

/// Checks the signed-product bounds and evaluates the margin of the coercivity
/// inequality with min(lambda1, lambda2). `lambda_drift` is the largest
/// observed relative decrease of the discrete eigenvalues across levels; a
/// pass whose margin does not exceed twice that drift is flagged conditional.
CheckReport check_H2(const Reaction& f1, const Reaction& f2, const ProblemSpec& spec,
                     const HypothesisConstants& constants, const EigenEstimate& lambda_p1,
                     const EigenEstimate& lambda_p2, const SamplingPlan& plan,
                     Real lambda_drift = 0.0);

/// Smallest R such that every splitting rho1 + rho2 = R satisfies
///   k1 rho1^{p1} + k2 rho2^{p2}
///     - |mu1| |Omega|^{(p1-q1)/p1} rho1^{q1} - |mu2| |Omega|^{(p2-q2)/p2} rho2^{q2} - C >= 0
/// with k_i = 1 - c1 - c2 - (d1+d2)/lambda_{1,p_i} and C the sum of the
/// gamma L1 norms. Found by a grid scan over splittings plus bisection in R.
/// Returns the configured floor (1.0) when no radius is ever violated.
/// Throws when the margin inequality fails.
Real apriori_radius(const ProblemSpec& spec, const HypothesisConstants& constants,
                    const EigenEstimate& lambda_p1, const EigenEstimate& lambda_p2,
                    Real domain_measure);

/// Worst-splitting value of the radius inequality at a given R (the grid-scan
/// primitive behind apriori_radius; exposed for diagnostics and tests).
Real radius_worst_value(const ProblemSpec& spec, const HypothesisConstants& constants,
                        const EigenEstimate& lambda_p1, const EigenEstimate& lambda_p2,
                        Real domain_measure, Real R, int grid = 10000);

}  // namespace pqsys
