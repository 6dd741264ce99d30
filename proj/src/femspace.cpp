#include "pqsys/femspace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace pqsys {

QuadratureRule QuadratureRule::centroid() {
  QuadratureRule rule;
  rule.barycentric.resize(1, 3);
  rule.barycentric << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
  rule.weights = Vector::Constant(1, 0.5);
  rule.degree = 1;
  return rule;
}

QuadratureRule QuadratureRule::degree2() {
  QuadratureRule rule;
  rule.barycentric.resize(3, 3);
  rule.barycentric << 2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0,
                      1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0,
                      1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0;
  rule.weights = Vector::Constant(3, 1.0 / 6.0);
  rule.degree = 2;
  return rule;
}

QuadratureRule QuadratureRule::degree4() {
  // Classical 6-point rule: two symmetric orbits.
  const Real a1 = 0.108103018168070, b1 = 0.445948490915965, w1 = 0.223381589678011;
  const Real a2 = 0.816847572980459, b2 = 0.091576213509771, w2 = 0.109951743655322;
  QuadratureRule rule;
  rule.barycentric.resize(6, 3);
  rule.barycentric << a1, b1, b1,
                      b1, a1, b1,
                      b1, b1, a1,
                      a2, b2, b2,
                      b2, a2, b2,
                      b2, b2, a2;
  rule.weights.resize(6);
  rule.weights << w1, w1, w1, w2, w2, w2;
  rule.weights *= 0.5;  // reference-triangle measure
  rule.degree = 4;
  return rule;
}

const QuadratureRule& default_quadrature() {
  static const QuadratureRule rule = QuadratureRule::degree4();
  return rule;
}

Vec2 gradient_on_element(const Mesh& mesh, const FemFunction& f, int element) {
  require(element >= 0 && element < mesh.num_triangles(), "gradient_on_element: element out of range");
  return mesh.shape_gradients[static_cast<std::size_t>(element)] * element_values(mesh, f, element);
}

Eigen::Matrix<Real, 3, 1> element_values(const Mesh& mesh, const FemFunction& f, int element) {
  Eigen::Matrix<Real, 3, 1> values;
  for (int k = 0; k < 3; ++k) {
    const int dof = mesh.interior_index(mesh.triangles(element, k));
    values(k) = dof >= 0 ? f.coeffs(dof) : 0.0;
  }
  return values;
}

Real norm_Lp(const Mesh& mesh, const FemFunction& f, Real p, const QuadratureRule& quad) {
  require(p > 1.0, "norm_Lp: exponent must exceed 1");
  require(f.coeffs.size() == mesh.num_interior(), "norm_Lp: coefficient count mismatch");
  Real total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto values = element_values(mesh, f, t);
    Real local = 0.0;
    for (int q = 0; q < quad.num_points(); ++q) {
      const Real fq = quad.barycentric.row(q) * values;
      local += quad.weights(q) * std::pow(std::abs(fq), p);
    }
    total += 2.0 * mesh.element_area(t) * local;
  }
  return std::pow(total, 1.0 / p);
}

Real seminorm_W1p(const Mesh& mesh, const FemFunction& f, Real p) {
  require(p > 1.0, "seminorm_W1p: exponent must exceed 1");
  require(f.coeffs.size() == mesh.num_interior(), "seminorm_W1p: coefficient count mismatch");
  Real total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Real g = gradient_on_element(mesh, f, t).norm();
    if (g > 0.0) total += mesh.element_area(t) * std::pow(g, p);
  }
  return std::pow(total, 1.0 / p);
}

Vector hat_seminorms(const Mesh& mesh, Real p) {
  Vector acc = Vector::Zero(mesh.num_interior());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& g = mesh.shape_gradients[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      const int dof = mesh.interior_index(mesh.triangles(t, k));
      if (dof >= 0) acc(dof) += mesh.element_area(t) * std::pow(g.col(k).norm(), p);
    }
  }
  return acc.array().pow(1.0 / p);
}

FemFunction interpolate(const Mesh& mesh, const std::function<Real(Real, Real)>& g) {
  FemFunction f = FemFunction::zero(mesh);
  for (int dof = 0; dof < mesh.num_interior(); ++dof) {
    const Vec2 x = mesh.vertex(mesh.interior_vertices[static_cast<std::size_t>(dof)]);
    f.coeffs(dof) = g(x.x(), x.y());
  }
  return f;
}

Real evaluate_at(const Mesh& mesh, const FemFunction& f, const Vec2& x) {
  constexpr Real tol = 1e-12;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 a = mesh.vertex(mesh.triangles(t, 0));
    const Vec2 b = mesh.vertex(mesh.triangles(t, 1));
    const Vec2 c = mesh.vertex(mesh.triangles(t, 2));
    const Real area = mesh.element_area(t);
    const Real la = 0.5 * ((b.x() - x.x()) * (c.y() - x.y()) - (c.x() - x.x()) * (b.y() - x.y())) / area;
    const Real lb = 0.5 * ((c.x() - x.x()) * (a.y() - x.y()) - (a.x() - x.x()) * (c.y() - x.y())) / area;
    const Real lc = 1.0 - la - lb;
    if (la >= -tol && lb >= -tol && lc >= -tol) {
      const auto values = element_values(mesh, f, t);
      return la * values(0) + lb * values(1) + lc * values(2);
    }
  }
  fail("evaluate_at: point outside mesh");
}

Real error_Lp(const Mesh& mesh, const FemFunction& f,
              const std::function<Real(Real, Real)>& g, Real p, const QuadratureRule& quad) {
  Real total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto values = element_values(mesh, f, t);
    const Vec2 a = mesh.vertex(mesh.triangles(t, 0));
    const Vec2 b = mesh.vertex(mesh.triangles(t, 1));
    const Vec2 c = mesh.vertex(mesh.triangles(t, 2));
    Real local = 0.0;
    for (int q = 0; q < quad.num_points(); ++q) {
      const Real fq = quad.barycentric.row(q) * values;
      const Vec2 xq = quad.barycentric(q, 0) * a + quad.barycentric(q, 1) * b + quad.barycentric(q, 2) * c;
      local += quad.weights(q) * std::pow(std::abs(fq - g(xq.x(), xq.y())), p);
    }
    total += 2.0 * mesh.element_area(t) * local;
  }
  return std::pow(total, 1.0 / p);
}

void write_fields_csv(std::ostream& os, const Mesh& mesh, const FemFunction& u,
                      const FemFunction& v) {
  os << "vertex_id,x,y,u_value,v_value\n";
  char buf[160];
  for (int vert = 0; vert < mesh.num_vertices(); ++vert) {
    const int dof = mesh.interior_index(vert);
    const Real uv = dof >= 0 ? u.coeffs(dof) : 0.0;
    const Real vv = dof >= 0 ? v.coeffs(dof) : 0.0;
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", vert, mesh.vertices(vert, 0),
                  mesh.vertices(vert, 1), uv, vv);
    os << buf;
  }
}

}  // namespace pqsys
