#pragma once

#include "pqsys/types.hpp"

#include <functional>
#include <vector>

namespace pqsys {

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<SparseMat(const Vector&)>;
using NormFn = std::function<Real(const Vector&)>;

struct NewtonOptions {
  Real tol = 1e-8;
  int max_iterations = 50;
  int max_halvings = 30;
  std::function<void(Vector&)> project;  // optional feasible-set projection
};

struct NewtonOutcome {
  Vector y;
  Real residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<Real> history;
};

/// Damped Newton: full step, halved until the residual norm decreases.
/// Stops early when the linear solver fails or no step length helps.
NewtonOutcome damped_newton(const ResidualFn& residual, const JacobianFn& jac,
                            const NormFn& norm, Vector y0, const NewtonOptions& opts);

struct PtcOptions {
  Real tol = 1e-8;
  int max_steps = 400;
  Real dt0 = 1e-2;
  Real grow = 1.5;
  Real shrink = 0.25;
  Real reduction_goal = 0.1;  // stop once the residual drops by this factor
  std::function<void(Vector&)> project;
};

/// Damped explicit steps on y' = -B(y), used as a basin finder when Newton
/// stagnates.
NewtonOutcome pseudo_transient(const ResidualFn& residual, const NormFn& norm, Vector y0,
                               const PtcOptions& opts);

}  // namespace pqsys
