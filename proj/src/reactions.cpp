#include "pqsys/reactions.hpp"

#include <cmath>
#include <cstdio>

namespace pqsys {

ScalarField ScalarField::constant(Real c) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", c);
  return {[c](Real, Real) { return c; }, buf};
}

ScalarField ScalarField::from_expression(const std::string& text) {
  Expression e = Expression::parse(text);
  return {[e](Real x, Real y) { return e.evaluate_xy(x, y); }, text};
}

Reaction Reaction::from_expression(const std::string& text) {
  Expression e = Expression::parse(text);
  ReactionFn fn = [e](const Vec2& x, Real s, Real t, const Vec2& xi, const Vec2& nu) {
    return e.evaluate({x.x(), x.y(), s, t, xi.x(), xi.y(), nu.x(), nu.y()});
  };
  return {std::move(fn), std::nullopt, text};
}

namespace {

Real fd_step(Real value) { return 1e-6 * (1.0 + std::abs(value)); }

Real check_finite(Real v, const char* what) {
  if (!std::isfinite(v)) fail(std::string("finite_difference_partials: non-finite probe of ") + what);
  return v;
}

}  // namespace

Reaction finite_difference_partials(Reaction reaction) {
  const ReactionFn f = reaction.evaluate;
  ReactionPartials p;
  p.ds = [f](const Vec2& x, Real s, Real t, const Vec2& xi, const Vec2& nu) {
    const Real h = fd_step(s);
    return check_finite((f(x, s + h, t, xi, nu) - f(x, s - h, t, xi, nu)) / (2.0 * h), "s");
  };
  p.dt = [f](const Vec2& x, Real s, Real t, const Vec2& xi, const Vec2& nu) {
    const Real h = fd_step(t);
    return check_finite((f(x, s, t + h, xi, nu) - f(x, s, t - h, xi, nu)) / (2.0 * h), "t");
  };
  p.dxi = [f](const Vec2& x, Real s, Real t, const Vec2& xi, const Vec2& nu) {
    Vec2 g;
    for (int k = 0; k < 2; ++k) {
      const Real h = fd_step(xi(k));
      Vec2 hi = xi, lo = xi;
      hi(k) += h;
      lo(k) -= h;
      g(k) = check_finite((f(x, s, t, hi, nu) - f(x, s, t, lo, nu)) / (2.0 * h), "xi");
    }
    return g;
  };
  p.dnu = [f](const Vec2& x, Real s, Real t, const Vec2& xi, const Vec2& nu) {
    Vec2 g;
    for (int k = 0; k < 2; ++k) {
      const Real h = fd_step(nu(k));
      Vec2 hi = nu, lo = nu;
      hi(k) += h;
      lo(k) -= h;
      g(k) = check_finite((f(x, s, t, xi, hi) - f(x, s, t, xi, lo)) / (2.0 * h), "nu");
    }
    return g;
  };
  reaction.partials = std::move(p);
  return reaction;
}

}  // namespace pqsys
