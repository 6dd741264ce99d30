#include "pqsys/solver_core.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace pqsys {

NewtonOutcome damped_newton(const ResidualFn& residual, const JacobianFn& jac,
                            const NormFn& norm, Vector y0, const NewtonOptions& opts) {
  NewtonOutcome out;
  out.y = std::move(y0);
  if (opts.project) opts.project(out.y);
  Vector r = residual(out.y);
  out.residual_norm = norm(r);
  out.history.push_back(out.residual_norm);

  Eigen::SparseLU<SparseMat> lu;
  const auto line_search = [&](const Vector& step) -> bool {
    Real alpha = 1.0;
    for (int h = 0; h < opts.max_halvings; ++h, alpha *= 0.5) {
      Vector trial = out.y + alpha * step;
      if (opts.project) opts.project(trial);
      const Vector r_trial = residual(trial);
      const Real n_trial = norm(r_trial);
      if (std::isfinite(n_trial) && n_trial < out.residual_norm) {
        out.y = std::move(trial);
        r = r_trial;
        out.residual_norm = n_trial;
        return true;
      }
    }
    return false;
  };

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (out.residual_norm <= opts.tol) {
      out.converged = true;
      return out;
    }
    SparseMat J = jac(out.y);
    lu.compute(J);
    bool accepted = false;
    if (lu.info() == Eigen::Success) {
      const Vector step = lu.solve(-r);
      if (step.allFinite()) accepted = line_search(step);
    }
    if (!accepted) {
      // Plain Newton fails near folds where J turns singular; retry with
      // increasing diagonal damping (Levenberg style, scaled by the
      // largest diagonal entry).
      Real diag_scale = 0.0;
      for (int k = 0; k < J.outerSize(); ++k) diag_scale = std::max(diag_scale, std::abs(J.coeff(k, k)));
      if (diag_scale == 0.0) diag_scale = 1.0;
      SparseMat identity(J.rows(), J.cols());
      identity.setIdentity();
      for (Real lambda = 1e-8; lambda <= 1.0 && !accepted; lambda *= 100.0) {
        lu.compute(SparseMat(J + (lambda * diag_scale) * identity));
        if (lu.info() != Eigen::Success) continue;
        const Vector step = lu.solve(-r);
        if (step.allFinite()) accepted = line_search(step);
      }
    }
    ++out.iterations;
    out.history.push_back(out.residual_norm);
    if (!accepted) return out;  // stagnation
  }
  out.converged = out.residual_norm <= opts.tol;
  return out;
}

NewtonOutcome pseudo_transient(const ResidualFn& residual, const NormFn& norm, Vector y0,
                               const PtcOptions& opts) {
  NewtonOutcome out;
  out.y = std::move(y0);
  if (opts.project) opts.project(out.y);
  Vector r = residual(out.y);
  out.residual_norm = norm(r);
  out.history.push_back(out.residual_norm);
  const Real initial = out.residual_norm;

  Real dt = opts.dt0 / (1.0 + out.residual_norm);
  for (int step = 0; step < opts.max_steps; ++step) {
    if (out.residual_norm <= opts.tol || out.residual_norm <= opts.reduction_goal * initial) break;
    Vector trial = out.y - dt * r;
    if (opts.project) opts.project(trial);
    const Vector r_trial = residual(trial);
    const Real n_trial = norm(r_trial);
    ++out.iterations;
    if (std::isfinite(n_trial) && n_trial < out.residual_norm) {
      out.y = std::move(trial);
      r = r_trial;
      out.residual_norm = n_trial;
      dt *= opts.grow;
    } else {
      dt *= opts.shrink;
      if (dt < 1e-14) break;
    }
    out.history.push_back(out.residual_norm);
  }
  out.converged = out.residual_norm <= opts.tol;
  return out;
}

}  // namespace pqsys
