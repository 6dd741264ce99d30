#include "pqsys/galerkin.hpp"

#include "pqsys/solver_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pqsys {

namespace {

PairState unstack(const Mesh& mesh, const Vector& y) {
  const int n = mesh.num_interior();
  PairState state;
  state.level = mesh.level;
  state.u = {mesh.level, y.head(n)};
  state.v = {mesh.level, y.tail(n)};
  return state;
}

Vector stack(const PairState& state) {
  Vector y(state.u.coeffs.size() + state.v.coeffs.size());
  y << state.u.coeffs, state.v.coeffs;
  return y;
}

std::vector<Real> eps_schedule(const SolverOptions& opts) {
  std::vector<Real> schedule;
  const int n = std::max(1, opts.eps_stages);
  for (int i = 0; i < n; ++i) {
    const Real f = n == 1 ? 1.0 : static_cast<Real>(i) / static_cast<Real>(n - 1);
    schedule.push_back(opts.eps_start * std::pow(opts.eps_end / opts.eps_start, f));
  }
  return schedule;
}

}  // namespace

LevelSolution solve_level(const ProblemSpec& spec, const RefinementHierarchy& hierarchy,
                          int level, const std::optional<PairState>& init, Real R, Real tol,
                          const SolverOptions& options) {
  require(level >= 0 && level < hierarchy.num_levels(), "solve_level: level out of range");
  require(tol > 0.0, "solve_level: tol must be positive");
  const Mesh& mesh = hierarchy.mesh(level);
  const int n = mesh.num_interior();

  const Vector w1 = hat_seminorms(mesh, spec.p1).cwiseMax(1e-300);
  const Vector w2 = hat_seminorms(mesh, spec.p2).cwiseMax(1e-300);
  const NormFn norm = [&](const Vector& r) {
    return std::max((r.head(n).cwiseQuotient(w1)).lpNorm<Eigen::Infinity>(),
                    (r.tail(n).cwiseQuotient(w2)).lpNorm<Eigen::Infinity>());
  };
  auto residual_at = [&](Real eps) {
    return [&, eps](const Vector& y) { return residual_A(mesh, unstack(mesh, y), spec, eps).stacked(); };
  };
  auto jacobian_at = [&](Real eps) {
    return [&, eps](const Vector& y) { return jacobian(mesh, unstack(mesh, y), spec, eps); };
  };
  std::function<void(Vector&)> project;
  if (R > 0.0) {
    project = [&mesh, &spec, R](Vector& y) {
      const Real pn = pair_norm(mesh, unstack(mesh, y), spec);
      if (pn > R) y *= R / pn;
    };
  }

  Vector y;
  if (init) {
    require(init->u.coeffs.size() == n && init->v.coeffs.size() == n,
            "solve_level: init does not match level");
    y = stack(*init);
  } else {
    y = Vector::Zero(2 * n);
  }

  int total_iterations = 0;
  std::vector<Real> history;
  const std::vector<Real> schedule = eps_schedule(options);
  for (Real eps : schedule) {
    NewtonOptions opts;
    opts.tol = std::max(tol, 0.1 * eps);
    opts.max_iterations = options.newton_max_iterations;
    opts.project = project;
    NewtonOutcome outcome = damped_newton(residual_at(eps), jacobian_at(eps), norm, std::move(y), opts);
    total_iterations += outcome.iterations;
    history.insert(history.end(), outcome.history.begin(), outcome.history.end());
    y = std::move(outcome.y);
  }

  // Polish against the exact residual; the last regularization only smooths
  // the Jacobian.
  const Real eps_jac = options.eps_end;
  NewtonOptions polish;
  polish.tol = tol * options.target_factor;
  polish.max_iterations = options.newton_max_iterations;
  polish.project = project;
  NewtonOutcome outcome =
      damped_newton(residual_at(0.0), jacobian_at(eps_jac), norm, std::move(y), polish);
  total_iterations += outcome.iterations;
  history.insert(history.end(), outcome.history.begin(), outcome.history.end());

  if (outcome.residual_norm > tol) {
    // Reactions vanishing at the origin make the zero state an exact
    // discrete solution; Newton cannot land on it across the singular
    // moduli, so test it outright when stalled in its basin.
    const Vector zero = Vector::Zero(2 * n);
    const Real zero_norm = norm(residual_at(0.0)(zero));
    if (zero_norm <= 0.1 * tol && outcome.y.lpNorm<Eigen::Infinity>() < 1e-3) {
      outcome.y = zero;
      outcome.residual_norm = zero_norm;
      history.push_back(zero_norm);
    }
  }
  if (outcome.residual_norm > tol) {
    PtcOptions ptc;
    ptc.tol = polish.tol;
    ptc.max_steps = options.ptc_max_steps;
    ptc.project = project;
    NewtonOutcome rescue = pseudo_transient(residual_at(0.0), norm, std::move(outcome.y), ptc);
    total_iterations += rescue.iterations;
    outcome = damped_newton(residual_at(0.0), jacobian_at(eps_jac), norm, std::move(rescue.y), polish);
    total_iterations += outcome.iterations;
    history.insert(history.end(), outcome.history.begin(), outcome.history.end());
  }

  LevelSolution solution;
  solution.state = unstack(mesh, outcome.y);
  solution.residual_linf = outcome.residual_norm;
  solution.pair_norm = pair_norm(mesh, solution.state, spec);
  solution.newton_iterations = total_iterations;
  solution.epsilon_final = eps_jac;
  solution.inside_ball = R <= 0.0 || solution.pair_norm <= R * (1.0 + 1e-12);
  solution.converged = outcome.residual_norm <= tol;
  if (!solution.converged) {
    throw SolveError("solve_level: stagnated at normalized residual " +
                         std::to_string(outcome.residual_norm) + " (tol " + std::to_string(tol) +
                         ", level " + std::to_string(level) + ")",
                     solution, history);
  }
  return solution;
}

namespace {

/// Composed interior-dof prolongation from `from` to `to`.
SparseMat composed_prolongation(const RefinementHierarchy& hierarchy, int from, int to) {
  require(from <= to, "composed_prolongation: from > to");
  SparseMat P;
  bool first = true;
  for (int l = from; l < to; ++l) {
    const SparseMat& step = hierarchy.prolongations[static_cast<std::size_t>(l)];
    P = first ? step : SparseMat(step * P);
    first = false;
  }
  if (first) {
    const int n = hierarchy.mesh(from).num_interior();
    P.resize(n, n);
    P.setIdentity();
  }
  return P;
}

PairState prolong_state(const RefinementHierarchy& hierarchy, const PairState& state, int to) {
  PairState out;
  out.level = to;
  out.u = {to, prolongate(hierarchy, state.u.coeffs, state.level, to)};
  out.v = {to, prolongate(hierarchy, state.v.coeffs, state.level, to)};
  return out;
}

}  // namespace

SolveReport run_hierarchy(const ProblemSpec& spec, const RefinementHierarchy& hierarchy,
                          int levels, Real tol, const HierarchyControls& controls) {
  require(levels >= 2, "run_hierarchy: need at least two levels");
  require(hierarchy.num_levels() >= levels + 1,
          "run_hierarchy: hierarchy must hold levels+1 meshes (diagnostics use the next-finer mesh)");

  SolveReport report;

  // Eigenvalue trend for both exponents; the finest estimate feeds the
  // margin inequality and the radius.
  const int eigen_top = std::min(levels - 1, controls.eigen_level_cap);
  for (int l = 0; l <= eigen_top; ++l) {
    report.lambda_p1.push_back(estimate_lambda1(spec.p1, hierarchy, l, controls.eigen_tol));
    report.lambda_p2.push_back(estimate_lambda1(spec.p2, hierarchy, l, controls.eigen_tol));
  }
  const EigenEstimate& lam1 = report.lambda_p1.back();
  const EigenEstimate& lam2 = report.lambda_p2.back();
  Real drift = 0.0;
  if (report.lambda_p1.size() >= 2) {
    const auto rel = [](const std::vector<EigenEstimate>& seq) {
      const Real a = seq[seq.size() - 2].lambda, b = seq.back().lambda;
      return std::abs(a - b) / b;
    };
    drift = std::max(rel(report.lambda_p1), rel(report.lambda_p2));
  }

  if (controls.constants) {
    SamplingPlan plan;
    plan.domain_mesh = &hierarchy.mesh(0);
    plan.n_samples = controls.check_samples;
    plan.max_magnitude = controls.check_max_magnitude;
    plan.seed = controls.seed;
    report.hypothesis_reports.push_back(check_H1(spec.f1, spec.f2, spec, *controls.constants, plan));
    if (controls.constants->D1 && controls.constants->D2)
      report.hypothesis_reports.push_back(
          check_H1prime(spec.f1, spec.f2, spec, *controls.constants, plan));
    report.hypothesis_reports.push_back(
        check_H2(spec.f1, spec.f2, spec, *controls.constants, lam1, lam2, plan, drift));
    const CheckReport& h2 = report.hypothesis_reports.back();
    const bool all_passed = std::all_of(report.hypothesis_reports.begin(),
                                        report.hypothesis_reports.end(),
                                        [](const CheckReport& r) { return r.passed; });
    if (h2.passed) {
      report.radius = apriori_radius(spec, *controls.constants, lam1, lam2,
                                     hierarchy.mesh(0).domain_measure);
    }
    if (!all_passed && !controls.override_hypotheses) {
      report.failure = "hypothesis checks failed";
      return report;
    }
  } else if (!controls.override_hypotheses) {
    report.failure = "no hypothesis constants supplied and override not set";
    return report;
  }

  std::optional<PairState> warm;
  if (controls.initial_iterate == InitialIterate::Sine) {
    const FemFunction seed_fn = interpolate(hierarchy.mesh(0), [](Real x, Real y) {
      return std::sin(M_PI * x) * std::sin(M_PI * y);
    });
    warm = PairState{seed_fn, seed_fn, 0};
  }
  for (int l = 0; l < levels; ++l) {
    try {
      LevelSolution solution =
          solve_level(spec, hierarchy, l, warm, report.radius, tol, controls.solver);
      report.condition_a.push_back(solution.pair_norm);
      warm = prolong_state(hierarchy, solution.state, std::min(l + 1, levels - 1));
      report.levels.push_back(std::move(solution));
    } catch (const SolveError& err) {
      report.levels.push_back(err.best);
      report.failure = err.what();
      return report;
    }
  }
  report.all_converged = true;

  // Diagnostics against the finest computed level and the next-finer mesh.
  const int finest = levels - 1;
  const PairState& star = report.levels[static_cast<std::size_t>(finest)].state;
  const Mesh& fine_mesh = hierarchy.mesh(finest);
  for (int l = 0; l < levels; ++l) {
    const PairState promoted = prolong_state(hierarchy, report.levels[static_cast<std::size_t>(l)].state, finest);
    FemFunction du{finest, promoted.u.coeffs - star.u.coeffs};
    FemFunction dv{finest, promoted.v.coeffs - star.v.coeffs};
    const ResidualPair res = residual_A(fine_mesh, promoted, spec);
    report.condition_c.push_back(pairing_with_function(res.r_u, du) +
                                 pairing_with_function(res.r_v, dv));
    const Vector au = apply_competing(fine_mesh, promoted.u, spec.p1, spec.q1, spec.mu1);
    const Vector av = apply_competing(fine_mesh, promoted.v, spec.p2, spec.q2, spec.mu2);
    report.condition_c_prime.push_back(pairing_with_function(au, du) +
                                       pairing_with_function(av, dv));
    report.strong_convergence.push_back(seminorm_W1p(fine_mesh, du, spec.p1) +
                                        seminorm_W1p(fine_mesh, dv, spec.p2));

    // Battery: level-0 hats paired against the next-finer assembly.
    const int measure_level = l + 1;
    const PairState lifted = prolong_state(hierarchy, report.levels[static_cast<std::size_t>(l)].state, measure_level);
    const ResidualPair lifted_res = residual_A(hierarchy.mesh(measure_level), lifted, spec);
    const SparseMat P0 = composed_prolongation(hierarchy, 0, measure_level);
    const Real bu = (P0.transpose() * lifted_res.r_u).lpNorm<Eigen::Infinity>();
    const Real bv = (P0.transpose() * lifted_res.r_v).lpNorm<Eigen::Infinity>();
    report.condition_b.push_back(std::max(bu, bv));
  }
  return report;
}

Real check_weak_solution(const RefinementHierarchy& hierarchy, const PairState& state,
                         const ProblemSpec& spec, const std::vector<FemFunction>& battery) {
  int top = state.level;
  for (const FemFunction& f : battery) top = std::max(top, f.level);
  require(top < hierarchy.num_levels(), "check_weak_solution: battery level out of range");
  const PairState promoted = prolong_state(hierarchy, state, top);
  const ResidualPair res = residual_A(hierarchy.mesh(top), promoted, spec);
  Real worst = 0.0;
  for (const FemFunction& f : battery) {
    FemFunction lifted{top, prolongate(hierarchy, f.coeffs, f.level, top)};
    worst = std::max(worst, std::abs(pairing_with_function(res.r_u, lifted)));
    worst = std::max(worst, std::abs(pairing_with_function(res.r_v, lifted)));
  }
  return worst;
}

Real cross_level_residual_linf(const RefinementHierarchy& hierarchy, const PairState& state,
                               const ProblemSpec& spec, int at_level) {
  require(at_level >= state.level && at_level < hierarchy.num_levels(),
          "cross_level_residual_linf: level out of range");
  const PairState promoted = prolong_state(hierarchy, state, at_level);
  const ResidualPair res = residual_A(hierarchy.mesh(at_level), promoted, spec);
  return std::max(res.r_u.lpNorm<Eigen::Infinity>(), res.r_v.lpNorm<Eigen::Infinity>());
}

std::pair<Real, Real> energy_identity_gap(const Mesh& mesh, const PairState& state,
                                          const ProblemSpec& spec) {
  const Real lhs_u = std::pow(seminorm_W1p(mesh, state.u, spec.p1), spec.p1);
  const Real rhs_u = spec.mu1 * std::pow(seminorm_W1p(mesh, state.u, spec.q1), spec.q1) +
                     pairing_with_function(assemble_nemytskii(mesh, spec.f1, state), state.u);
  const Real lhs_v = std::pow(seminorm_W1p(mesh, state.v, spec.p2), spec.p2);
  const Real rhs_v = spec.mu2 * std::pow(seminorm_W1p(mesh, state.v, spec.q2), spec.q2) +
                     pairing_with_function(assemble_nemytskii(mesh, spec.f2, state), state.v);
  return {std::abs(lhs_u - rhs_u), std::abs(lhs_v - rhs_v)};
}

}  // namespace pqsys
