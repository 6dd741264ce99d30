#include "pqsys/operators.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <tuple>

namespace pqsys {

namespace {

/// (eps^2 + g^2)^{(r-2)/2}, with the exact singular limit at eps = 0.
Real modulus(Real g, Real r, Real eps) {
  if (eps > 0.0) return std::pow(eps * eps + g * g, 0.5 * (r - 2.0));
  return g > 0.0 ? std::pow(g, r - 2.0) : 0.0;
}

void check_exponents(Real p, Real q) {
  require(q > 1.0 && q < p, "competing operator needs 1 < q < p");
}

}  // namespace

void ProblemSpec::validate() const {
  for (auto [p, q, tag] : {std::tuple{p1, q1, "1"}, std::tuple{p2, q2, "2"}}) {
    const std::string i(tag);
    if (!(q > 1.0)) fail("q" + i + " <= 1 violates 1 < q_i < p_i < N");
    if (!(q < p)) fail("q" + i + " >= p" + i + " violates 1 < q_i < p_i < N");
    if (!(p < 2.0)) fail("p" + i + " >= 2 violates p_i < N = 2");
  }
}

Real pair_norm(const Mesh& mesh, const PairState& state, const ProblemSpec& spec) {
  return seminorm_W1p(mesh, state.u, spec.p1) + seminorm_W1p(mesh, state.v, spec.p2);
}

Vector apply_competing(const Mesh& mesh, const FemFunction& f, Real p, Real q, Real mu,
                       Real eps) {
  check_exponents(p, q);
  require(f.coeffs.size() == mesh.num_interior(), "apply_competing: coefficient count mismatch");
  Vector out = Vector::Zero(mesh.num_interior());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 grad = gradient_on_element(mesh, f, t);
    const Real g = grad.norm();
    if (g == 0.0 && eps == 0.0) continue;
    const Vec2 flux = (modulus(g, p, eps) - mu * modulus(g, q, eps)) * grad;
    const auto& shapes = mesh.shape_gradients[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      const int dof = mesh.interior_index(mesh.triangles(t, k));
      if (dof >= 0) out(dof) += mesh.element_area(t) * flux.dot(shapes.col(k));
    }
  }
  return out;
}

Real pairing_with_function(const Vector& residual, const FemFunction& g) {
  require(residual.size() == g.coeffs.size(), "pairing_with_function: level mismatch");
  return residual.dot(g.coeffs);
}

std::vector<std::pair<Real, Real>> probe_nonmonotonicity(const Mesh& mesh, const FemFunction& f0,
                                                         Real p, Real q, Real mu,
                                                         const std::vector<Real>& t_grid) {
  check_exponents(p, q);
  const Real a = std::pow(seminorm_W1p(mesh, f0, p), p);
  const Real b = std::pow(seminorm_W1p(mesh, f0, q), q);
  require(a > 0.0, "probe_nonmonotonicity: f0 must be nonzero");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    require(t_grid[i] > t_grid[i - 1], "probe_nonmonotonicity: t_grid must be ascending");
  std::vector<std::pair<Real, Real>> samples;
  samples.reserve(t_grid.size());
  for (Real t : t_grid) {
    require(t > 0.0, "probe_nonmonotonicity: t must be positive");
    samples.emplace_back(t, std::pow(t, p) * a - mu * std::pow(t, q) * b);
  }
  return samples;
}

std::vector<Real> probe_default_grid(const Mesh& mesh, const FemFunction& f0, Real p, Real q,
                                     Real mu, int points) {
  require(points >= 2, "probe_default_grid: need at least two points");
  Real t_star = 1.0;
  if (mu > 0.0) {
    const Real a = std::pow(seminorm_W1p(mesh, f0, p), p);
    const Real b = std::pow(seminorm_W1p(mesh, f0, q), q);
    require(a > 0.0, "probe_default_grid: f0 must be nonzero");
    t_star = std::pow(mu * b / a, 1.0 / (p - q));
  }
  std::vector<Real> grid(static_cast<std::size_t>(points));
  const Real lo = std::log(1e-3 * t_star);
  const Real hi = std::log(1e3 * t_star);
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (points - 1));
  return grid;
}

Vector assemble_nemytskii(const Mesh& mesh, const Reaction& reaction, const PairState& state,
                          const QuadratureRule& quad) {
  require(state.u.coeffs.size() == mesh.num_interior() &&
              state.v.coeffs.size() == mesh.num_interior(),
          "assemble_nemytskii: state does not match mesh");
  Vector out = Vector::Zero(mesh.num_interior());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto uvals = element_values(mesh, state.u, t);
    const auto vvals = element_values(mesh, state.v, t);
    const Vec2 xi = mesh.shape_gradients[static_cast<std::size_t>(t)] * uvals;
    const Vec2 nu = mesh.shape_gradients[static_cast<std::size_t>(t)] * vvals;
    const Vec2 a = mesh.vertex(mesh.triangles(t, 0));
    const Vec2 b = mesh.vertex(mesh.triangles(t, 1));
    const Vec2 c = mesh.vertex(mesh.triangles(t, 2));
    const Real scale = 2.0 * mesh.element_area(t);
    for (int qp = 0; qp < quad.num_points(); ++qp) {
      const Vec2 xq = quad.barycentric(qp, 0) * a + quad.barycentric(qp, 1) * b +
                      quad.barycentric(qp, 2) * c;
      const Real s = quad.barycentric.row(qp) * uvals;
      const Real tv = quad.barycentric.row(qp) * vvals;
      const Real fq = reaction.evaluate(xq, s, tv, xi, nu);
      if (!std::isfinite(fq)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "assemble_nemytskii: non-finite reaction at x=(%.6g, %.6g), element %d",
                      xq.x(), xq.y(), t);
        fail(buf);
      }
      const Real wf = scale * quad.weights(qp) * fq;
      for (int k = 0; k < 3; ++k) {
        const int dof = mesh.interior_index(mesh.triangles(t, k));
        if (dof >= 0) out(dof) += wf * quad.barycentric(qp, k);
      }
    }
  }
  return out;
}

ResidualPair residual_A(const Mesh& mesh, const PairState& state, const ProblemSpec& spec,
                        Real eps, const QuadratureRule& quad) {
  ResidualPair r;
  r.r_u = apply_competing(mesh, state.u, spec.p1, spec.q1, spec.mu1, eps) -
          assemble_nemytskii(mesh, spec.f1, state, quad);
  r.r_v = apply_competing(mesh, state.v, spec.p2, spec.q2, spec.mu2, eps) -
          assemble_nemytskii(mesh, spec.f2, state, quad);
  return r;
}

namespace {

/// d/d(grad) of (eps^2+|grad|^2)^{(r-2)/2} grad, a symmetric 2x2 tensor.
Mat2 flux_tangent(const Vec2& grad, Real r, Real eps) {
  const Real s2 = eps * eps + grad.squaredNorm();
  if (s2 == 0.0) return Mat2::Zero();
  const Real m = std::pow(s2, 0.5 * (r - 2.0));
  return m * Mat2::Identity() + (r - 2.0) * std::pow(s2, 0.5 * (r - 4.0)) * grad * grad.transpose();
}

void add_competing_jacobian(const Mesh& mesh, const FemFunction& f, Real p, Real q, Real mu,
                            Real eps, int offset, std::vector<Triplet>& triplets) {
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 grad = gradient_on_element(mesh, f, t);
    const Mat2 tangent = flux_tangent(grad, p, eps) - mu * flux_tangent(grad, q, eps);
    const auto& shapes = mesh.shape_gradients[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      const int row = mesh.interior_index(mesh.triangles(t, k));
      if (row < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int col = mesh.interior_index(mesh.triangles(t, j));
        if (col < 0) continue;
        triplets.emplace_back(offset + row, offset + col,
                              mesh.element_area(t) * shapes.col(k).dot(tangent * shapes.col(j)));
      }
    }
  }
}

void add_nemytskii_jacobian(const Mesh& mesh, const Reaction& reaction, const PairState& state,
                            const QuadratureRule& quad, int row_offset, int n,
                            std::vector<Triplet>& triplets) {
  const Reaction with_partials =
      reaction.partials ? reaction : finite_difference_partials(reaction);
  const auto& partials = *with_partials.partials;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto uvals = element_values(mesh, state.u, t);
    const auto vvals = element_values(mesh, state.v, t);
    const auto& shapes = mesh.shape_gradients[static_cast<std::size_t>(t)];
    const Vec2 xi = shapes * uvals;
    const Vec2 nu = shapes * vvals;
    const Vec2 a = mesh.vertex(mesh.triangles(t, 0));
    const Vec2 b = mesh.vertex(mesh.triangles(t, 1));
    const Vec2 c = mesh.vertex(mesh.triangles(t, 2));
    const Real scale = 2.0 * mesh.element_area(t);
    for (int qp = 0; qp < quad.num_points(); ++qp) {
      const Vec2 xq = quad.barycentric(qp, 0) * a + quad.barycentric(qp, 1) * b +
                      quad.barycentric(qp, 2) * c;
      const Real s = quad.barycentric.row(qp) * uvals;
      const Real tv = quad.barycentric.row(qp) * vvals;
      const Real w = scale * quad.weights(qp);
      const Real fs = partials.ds(xq, s, tv, xi, nu);
      const Real ft = partials.dt(xq, s, tv, xi, nu);
      const Vec2 fxi = partials.dxi(xq, s, tv, xi, nu);
      const Vec2 fnu = partials.dnu(xq, s, tv, xi, nu);
      for (int k = 0; k < 3; ++k) {
        const int row = mesh.interior_index(mesh.triangles(t, k));
        if (row < 0) continue;
        const Real wk = w * quad.barycentric(qp, k);
        for (int j = 0; j < 3; ++j) {
          const int col = mesh.interior_index(mesh.triangles(t, j));
          if (col < 0) continue;
          const Real phi_j = quad.barycentric(qp, j);
          // Residual subtracts the Nemytskii vector, hence the minus signs.
          triplets.emplace_back(row_offset + row, col,
                                -wk * (fs * phi_j + fxi.dot(shapes.col(j))));
          triplets.emplace_back(row_offset + row, n + col,
                                -wk * (ft * phi_j + fnu.dot(shapes.col(j))));
        }
      }
    }
  }
}

}  // namespace

SparseMat jacobian(const Mesh& mesh, const PairState& state, const ProblemSpec& spec,
                   Real epsilon_reg, const QuadratureRule& quad) {
  require(epsilon_reg >= 0.0, "jacobian: epsilon_reg must be nonnegative");
  const int n = mesh.num_interior();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(40 * n));
  add_competing_jacobian(mesh, state.u, spec.p1, spec.q1, spec.mu1, epsilon_reg, 0, triplets);
  add_competing_jacobian(mesh, state.v, spec.p2, spec.q2, spec.mu2, epsilon_reg, n, triplets);
  add_nemytskii_jacobian(mesh, spec.f1, state, quad, 0, n, triplets);
  add_nemytskii_jacobian(mesh, spec.f2, state, quad, n, n, triplets);
  SparseMat J(2 * n, 2 * n);
  J.setFromTriplets(triplets.begin(), triplets.end());
  J.makeCompressed();
  return J;
}

}  // namespace pqsys
