#include "pqsys/eigenvalue.hpp"

#include "pqsys/operators.hpp"
#include "pqsys/solver_core.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <functional>
#include <memory>

namespace pqsys {

namespace {

/// Mass-type vector b_j = integral of |w|^{r-2} w hat_j by quadrature.
Vector weighted_mass_vector(const Mesh& mesh, const FemFunction& w, Real r) {
  const QuadratureRule& quad = default_quadrature();
  Vector out = Vector::Zero(mesh.num_interior());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto values = element_values(mesh, w, t);
    const Real scale = 2.0 * mesh.element_area(t);
    for (int qp = 0; qp < quad.num_points(); ++qp) {
      const Real s = quad.barycentric.row(qp) * values;
      const Real g = s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), r - 1.0), s);
      const Real wf = scale * quad.weights(qp) * g;
      for (int k = 0; k < 3; ++k) {
        const int dof = mesh.interior_index(mesh.triangles(t, k));
        if (dof >= 0) out(dof) += wf * quad.barycentric(qp, k);
      }
    }
  }
  return out;
}

/// Stiffness of the plain Laplacian (r = 2 fast path).
SparseMat laplace_stiffness(const Mesh& mesh) {
  std::vector<Triplet> triplets;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& shapes = mesh.shape_gradients[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      const int row = mesh.interior_index(mesh.triangles(t, k));
      if (row < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int col = mesh.interior_index(mesh.triangles(t, j));
        if (col >= 0)
          triplets.emplace_back(row, col, mesh.element_area(t) * shapes.col(k).dot(shapes.col(j)));
      }
    }
  }
  SparseMat K(mesh.num_interior(), mesh.num_interior());
  K.setFromTriplets(triplets.begin(), triplets.end());
  K.makeCompressed();
  return K;
}

/// Solves -div(|grad w|^{r-2} grad w) = b with Newton and an epsilon
/// continuation, warm-started from `init`.
Vector solve_r_laplacian(const Mesh& mesh, Real r, const Vector& b, Vector init) {
  const Real q_dummy = 0.5 * (1.0 + r);  // any valid companion exponent; mu = 0
  const Vector weights = hat_seminorms(mesh, r).cwiseMax(1e-300);
  const NormFn norm = [&](const Vector& v) { return (v.cwiseQuotient(weights)).lpNorm<Eigen::Infinity>(); };
  auto residual_at = [&](Real eps) {
    return [&, eps](const Vector& y) -> Vector {
      FemFunction f{mesh.level, y};
      return apply_competing(mesh, f, r, q_dummy, 0.0, eps) - b;
    };
  };
  auto jacobian_at = [&](Real eps) {
    return [&, eps](const Vector& y) -> SparseMat {
      // Competing Jacobian of the single equation: reuse the pair assembly
      // with a zero second component and zero reactions.
      PairState state{FemFunction{mesh.level, y}, FemFunction::zero(mesh), mesh.level};
      ProblemSpec single;
      single.p1 = r;
      single.q1 = q_dummy;
      single.p2 = r;
      single.q2 = q_dummy;
      SparseMat full = jacobian(mesh, state, single, eps);
      return SparseMat(full.block(0, 0, mesh.num_interior(), mesh.num_interior()));
    };
  };

  Vector y = std::move(init);
  const std::vector<Real> schedule = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8};
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    NewtonOptions opts;
    opts.tol = (i + 1 == schedule.size()) ? 1e-11 : std::max(1e-11, schedule[i] * 1e-2);
    opts.max_iterations = 60;
    NewtonOutcome outcome = damped_newton(residual_at(schedule[i]), jacobian_at(schedule[i]), norm,
                                          std::move(y), opts);
    if (!outcome.converged && i + 1 == schedule.size()) {
      PtcOptions ptc;
      ptc.tol = opts.tol;
      outcome = pseudo_transient(residual_at(schedule[i]), norm, std::move(outcome.y), ptc);
      outcome = damped_newton(residual_at(schedule[i]), jacobian_at(schedule[i]), norm,
                              std::move(outcome.y), opts);
    }
    y = std::move(outcome.y);
  }
  return y;
}

}  // namespace

Real rayleigh_quotient(const Mesh& mesh, const FemFunction& f, Real r) {
  const Real denom = norm_Lp(mesh, f, r);
  require(denom > 0.0, "rayleigh_quotient: zero function");
  return std::pow(seminorm_W1p(mesh, f, r), r) / std::pow(denom, r);
}

EigenEstimate estimate_lambda1(Real r, const RefinementHierarchy& hierarchy, int level, Real tol,
                               int max_iterations) {
  require(r > 1.0 && r <= 2.0, "estimate_lambda1: r must lie in (1, 2]");
  require(level >= 0 && level < hierarchy.num_levels(), "estimate_lambda1: level out of range");
  require(tol > 0.0, "estimate_lambda1: tol must be positive");
  const Mesh& mesh = hierarchy.mesh(level);

  FemFunction w = interpolate(mesh, [](Real x, Real y) {
    return std::sin(M_PI * x) * std::sin(M_PI * y);
  });
  w.coeffs /= norm_Lp(mesh, w, r);
  Real lambda = rayleigh_quotient(mesh, w, r);

  // For r = 2 every inverse-iteration step reuses one stiffness factorization.
  std::function<Vector(const Vector&, const Vector&)> inner_solve;
  if (r == 2.0) {
    auto lu = std::make_shared<Eigen::SparseLU<SparseMat>>();
    lu->compute(laplace_stiffness(mesh));
    require(lu->info() == Eigen::Success, "estimate_lambda1: stiffness factorization failed");
    inner_solve = [lu](const Vector& b, const Vector&) -> Vector { return lu->solve(b); };
  } else {
    inner_solve = [&mesh, r](const Vector& b, const Vector& warm) -> Vector {
      return solve_r_laplacian(mesh, r, b, warm);
    };
  }

  EigenEstimate est;
  est.r = r;
  est.level = level;
  est.lambda = lambda;
  est.minimizer = w;
  est.residual = 1.0;

  for (int it = 1; it <= max_iterations; ++it) {
    const Vector b = lambda * weighted_mass_vector(mesh, w, r);
    Vector z = inner_solve(b, w.coeffs);
    FemFunction next{mesh.level, std::move(z)};
    const Real zn = norm_Lp(mesh, next, r);
    require(zn > 0.0, "estimate_lambda1: iteration collapsed to zero");
    next.coeffs /= zn;
    const Real next_lambda = rayleigh_quotient(mesh, next, r);
    const Real change = std::abs(next_lambda - lambda) / std::abs(next_lambda);
    w = std::move(next);
    lambda = next_lambda;
    if (next_lambda < est.lambda || it == 1) {
      est.lambda = lambda;
      est.minimizer = w;
    }
    est.iterations = it;
    est.residual = change;
    if (change < tol) {
      est.lambda = lambda;
      est.minimizer = w;
      return est;
    }
  }
  throw EigenError("estimate_lambda1: no convergence after " + std::to_string(max_iterations) +
                       " iterations (last relative change " + std::to_string(est.residual) + ")",
                   est);
}

}  // namespace pqsys
