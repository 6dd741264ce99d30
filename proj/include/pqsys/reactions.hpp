#pragma once

#include "pqsys/expression.hpp"
#include "pqsys/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace pqsys {

/// Sampleable function on the domain, with its defining text kept for
/// serialization and reporting.
struct ScalarField {
  std::function<Real(Real, Real)> eval;
  std::string source;

  Real operator()(Real x, Real y) const { return eval(x, y); }

  static ScalarField zero() {
    return {[](Real, Real) { return 0.0; }, "0"};
  }
  static ScalarField constant(Real c);
  static ScalarField from_expression(const std::string& text);
};

using ReactionFn = std::function<Real(const Vec2&, Real, Real, const Vec2&, const Vec2&)>;
using ReactionGradFn = std::function<Vec2(const Vec2&, Real, Real, const Vec2&, const Vec2&)>;

struct ReactionPartials {
  ReactionFn ds, dt;
  ReactionGradFn dxi, dnu;
};

/// Carathéodory right-hand side f(x, s, t, xi, nu). Partials are optional;
/// assembly falls back to finite differences when they are absent.
struct Reaction {
  ReactionFn evaluate;
  std::optional<ReactionPartials> partials;
  std::string source;  // expression text or a symbolic tag

  static Reaction zero() {
    return {[](const Vec2&, Real, Real, const Vec2&, const Vec2&) { return 0.0; }, std::nullopt, "0"};
  }
  static Reaction from_expression(const std::string& text);
};

/// Central differences with step 1e-6*(1+|argument|), attached as partials.
Reaction finite_difference_partials(Reaction reaction);

}  // namespace pqsys
