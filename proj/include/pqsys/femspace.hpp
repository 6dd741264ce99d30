#pragma once

#include "pqsys/mesh.hpp"

#include <functional>
#include <iosfwd>

namespace pqsys {

/// Piecewise-linear function with homogeneous Dirichlet trace: one
/// coefficient per interior vertex, boundary values implicitly zero.
struct FemFunction {
  int level = 0;
  Vector coeffs;

  static FemFunction zero(const Mesh& mesh) {
    return {mesh.level, Vector::Zero(mesh.num_interior())};
  }
};

/// Symmetric quadrature rule on the reference triangle; weights sum to 1/2.
struct QuadratureRule {
  Eigen::Matrix<Real, Eigen::Dynamic, 3> barycentric;
  Vector weights;
  int degree = 0;

  int num_points() const { return static_cast<int>(weights.size()); }

  static QuadratureRule centroid();  // degree 1
  static QuadratureRule degree2();   // 3 interior points
  static QuadratureRule degree4();   // 6 points, project default
};

const QuadratureRule& default_quadrature();

/// Exact gradient of the linear function on one triangle (constant there).
Vec2 gradient_on_element(const Mesh& mesh, const FemFunction& f, int element);

/// Nodal values of f on one element (boundary vertices contribute zero).
Eigen::Matrix<Real, 3, 1> element_values(const Mesh& mesh, const FemFunction& f, int element);

/// (Integral over the domain of |f|^p)^(1/p) by quadrature.
Real norm_Lp(const Mesh& mesh, const FemFunction& f, Real p,
             const QuadratureRule& quad = default_quadrature());

/// (Sum over elements of area * |grad f|^p)^(1/p); exact for P1.
Real seminorm_W1p(const Mesh& mesh, const FemFunction& f, Real p);

/// W^{1,p}-seminorms of all nodal hat functions, used to normalize residuals.
Vector hat_seminorms(const Mesh& mesh, Real p);

/// Nodal interpolant of a callable (sampled at interior vertices only).
FemFunction interpolate(const Mesh& mesh, const std::function<Real(Real, Real)>& g);

/// Point evaluation (zero outside the interior dof support on the boundary).
/// Locates the containing triangle by scan; intended for tests and dumps.
Real evaluate_at(const Mesh& mesh, const FemFunction& f, const Vec2& x);

/// Quadrature norm of the difference f - g where g is a callable, used for
/// manufactured-solution errors: (integral of |f - g|^p)^(1/p).
Real error_Lp(const Mesh& mesh, const FemFunction& f,
              const std::function<Real(Real, Real)>& g, Real p,
              const QuadratureRule& quad = default_quadrature());

/// Per-vertex CSV `vertex_id,x,y,u_value,v_value`.
void write_fields_csv(std::ostream& os, const Mesh& mesh, const FemFunction& u,
                      const FemFunction& v);

}  // namespace pqsys
