#pragma once

#include "pqsys/hypotheses.hpp"
#include "pqsys/operators.hpp"

namespace pqsys {

/// Parameters of the built-in reaction family
///   f1(x,s,t,xi,nu) = |s|^{a1-2} s + s/(s^2+1) (|t|^{p2/(p1*)'} + |xi|^{b1} + |nu|^{p2/(p1*)'} + h1(x))
///   f2(x,s,t,xi,nu) = |t|^{a2-2} t + t/(t^2+1) (|s|^{p1/(p2*)'} + |xi|^{p1/(p2*)'} + |nu|^{b2} + h2(x))
/// with 1 <= a_i < p_i and 1 <= b_i < p_i/(p_i*)'. The family satisfies the
/// growth bound with C1 = C2 = 1 and sigma_i = |h_i| + 3, and the signed
/// products admit majorants for any (c_i, d_i) once constants
/// gamma_i = |h_i| + chat_i are added.
struct ExampleReactionParams {
  Real alpha1 = 1.5, alpha2 = 1.5;
  Real beta1 = 0.0, beta2 = 0.0;  // <= 0 means 80% of the admissible upper bound
  ScalarField h1 = ScalarField::zero();
  ScalarField h2 = ScalarField::zero();
  Real c1 = 0.05, c2 = 0.05, d1 = 0.05, d2 = 0.05;  // target coercivity budgets
  Real slack_magnitude = 1e4;  // argument range the gamma constants must cover
};

struct ExampleReactions {
  Reaction f1, f2;
  HypothesisConstants constants;
  ExampleReactionParams params;  // with defaulted betas resolved
};

/// Builds the reaction pair plus certified constants. The slack constants
/// chat_i are the maxima of each term's Young-inequality gap over a dense
/// magnitude grid covering slack_magnitude (capped by the analytic supremum),
/// so the emitted gamma_i majorize the signed products on the whole audited
/// argument range. The mesh supplies quadrature for the gamma L1 norms.
ExampleReactions build_example_reactions(ExampleReactionParams params, const ProblemSpec& spec,
                                         const Mesh& mesh);

/// sup_{z >= 0} (z^a - eps z^b) for 0 < a < b: the additive constant that
/// makes z^a <= eps z^b + young_slack(a, eps, b) hold for all z.
Real young_slack(Real a, Real eps, Real b);

}  // namespace pqsys
