#pragma once

#include "pqsys/femspace.hpp"
#include "pqsys/reactions.hpp"

#include <utility>
#include <vector>

namespace pqsys {

/// Exponents, coefficients and reactions of the two-equation system
///   -div(|grad u|^{p1-2} grad u) + mu1 div(|grad u|^{q1-2} grad u) = f1(x,u,v,grad u,grad v)
///   -div(|grad v|^{p2-2} grad v) + mu2 div(|grad v|^{q2-2} grad v) = f2(x,u,v,grad u,grad v)
/// with zero Dirichlet data. The 2D build restricts exponents to
/// 1 < q_i < p_i < 2, so the Sobolev conjugates p_i* = 2 p_i/(2-p_i) exist.
struct ProblemSpec {
  Real p1 = 1.8, q1 = 1.3;
  Real p2 = 1.7, q2 = 1.2;
  Real mu1 = 0.0, mu2 = 0.0;
  Reaction f1 = Reaction::zero();
  Reaction f2 = Reaction::zero();

  Real p1_star() const { return critical_exponent(p1); }
  Real p2_star() const { return critical_exponent(p2); }

  /// Enforces 1 < q_i < p_i < 2; throws naming the violated constraint.
  void validate() const;

  static Real critical_exponent(Real p) {
    require(p > 1.0 && p < 2.0, "critical exponent needs 1 < p < 2");
    return 2.0 * p / (2.0 - p);
  }
  /// Hölder conjugate r' = r/(r-1).
  static Real conjugate(Real r) {
    require(r > 1.0, "conjugate exponent needs r > 1");
    return r / (r - 1.0);
  }
};

/// Solution pair (u, v) on one mesh level.
struct PairState {
  FemFunction u, v;
  int level = 0;

  static PairState zero(const Mesh& mesh) {
    return {FemFunction::zero(mesh), FemFunction::zero(mesh), mesh.level};
  }
};

/// Duality coefficients of the system residual against the nodal hats.
struct ResidualPair {
  Vector r_u, r_v;

  Vector stacked() const {
    Vector y(r_u.size() + r_v.size());
    y << r_u, r_v;
    return y;
  }
};

/// ||u||_{1,p1} + ||v||_{1,p2}.
Real pair_norm(const Mesh& mesh, const PairState& state, const ProblemSpec& spec);

/// Duality coefficients of -div(|grad f|^{p-2} grad f) + mu div(|grad f|^{q-2} grad f)
/// against the nodal hats:
///   entry k = integral of (|grad f|^{p-2} - mu |grad f|^{q-2}) grad f . grad hat_k.
/// Exact per element for P1. With eps > 0 the moduli are smoothed to
/// (eps^2 + |grad f|^2)^{(r-2)/2}; zero-gradient elements contribute 0 when
/// eps = 0 (the natural limit for p > 1).
Vector apply_competing(const Mesh& mesh, const FemFunction& f, Real p, Real q, Real mu,
                       Real eps = 0.0);

/// <functional, g> for g in the discrete space: sum_k residual_k * g_k.
Real pairing_with_function(const Vector& residual, const FemFunction& g);

/// Scaling energy E(t) = <A(t f0), t f0> = t^p ||grad f0||_p^p - mu t^q ||grad f0||_q^q
/// sampled on t_grid. For mu > 0 the energy is negative for small t and
/// positive for large t; the sign change sits at
/// t* = (mu ||grad f0||_q^q / ||grad f0||_p^p)^{1/(p-q)}.
std::vector<std::pair<Real, Real>> probe_nonmonotonicity(const Mesh& mesh, const FemFunction& f0,
                                                         Real p, Real q, Real mu,
                                                         const std::vector<Real>& t_grid);

/// Log-spaced default grid spanning [1e-3 t*, 1e3 t*] around the closed-form
/// sign change (or [1e-3, 1e3] when mu <= 0 yields none).
std::vector<Real> probe_default_grid(const Mesh& mesh, const FemFunction& f0, Real p, Real q,
                                     Real mu, int points = 400);

/// Superposition right-hand side against the hats:
///   entry k = integral of f(x, u, v, grad u, grad v) hat_k by quadrature.
/// Throws naming the offending quadrature point if the reaction returns a
/// non-finite value.
Vector assemble_nemytskii(const Mesh& mesh, const Reaction& reaction, const PairState& state,
                          const QuadratureRule& quad = default_quadrature());

/// Full system residual: competing part minus the Nemytskii vectors.
ResidualPair residual_A(const Mesh& mesh, const PairState& state, const ProblemSpec& spec,
                        Real eps = 0.0, const QuadratureRule& quad = default_quadrature());

/// Derivative of residual_A with respect to the stacked coefficients
/// [u; v]. Gradient moduli are regularized as (eps^2 + |grad|^2)^{(r-2)/2};
/// reaction blocks use supplied partials or central finite differences.
SparseMat jacobian(const Mesh& mesh, const PairState& state, const ProblemSpec& spec,
                   Real epsilon_reg, const QuadratureRule& quad = default_quadrature());

}  // namespace pqsys
