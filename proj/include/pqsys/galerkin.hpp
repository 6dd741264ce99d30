#pragma once

#include "pqsys/hypotheses.hpp"
#include "pqsys/operators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pqsys {

struct SolverOptions {
  Real tol = 1e-8;                 // on the normalized residual max-norm
  int newton_max_iterations = 50;  // per continuation stage
  int eps_stages = 6;
  Real eps_start = 1e-2;
  Real eps_end = 1e-8;
  Real target_factor = 1e-3;  // polish aims below tol by this factor
  int ptc_max_steps = 400;
};

/// One converged finite-dimensional solve. residual_linf is the max over the
/// basis of |<residual, hat_k>| / ||hat_k||_{1,p_i}, with the exact
/// (unregularized) residual.
struct LevelSolution {
  PairState state;
  Real residual_linf = 0.0;
  Real pair_norm = 0.0;
  int newton_iterations = 0;
  Real epsilon_final = 0.0;
  bool inside_ball = true;
  bool converged = false;
};

struct SolveError : std::runtime_error {
  SolveError(const std::string& msg, LevelSolution best, std::vector<Real> history)
      : std::runtime_error(msg), best(std::move(best)), residual_history(std::move(history)) {}
  LevelSolution best;
  std::vector<Real> residual_history;
};

/// Damped Newton on the epsilon-regularized system with continuation
/// eps_start -> eps_end, a final polish against the exact residual, radial
/// projection back onto the ball ||(u,v)|| <= R (disabled when R <= 0), and a
/// pseudo-transient fallback on stagnation. Throws SolveError if both
/// strategies stall above tol.
LevelSolution solve_level(const ProblemSpec& spec, const RefinementHierarchy& hierarchy,
                          int level, const std::optional<PairState>& init, Real R, Real tol,
                          const SolverOptions& options = {});

/// Per-level convergence diagnostics for a hierarchy run. The reference pair
/// in the (c)/(c') pairings and the strong-convergence distances is the
/// finest computed level; the test battery for condition_b is the set of
/// level-0 hats, measured against the next-finer assembly of each level's
/// solution (on its own level the pairing vanishes by Galerkin
/// orthogonality, so the inter-level measurement carries the content).
struct SolveReport {
  std::vector<LevelSolution> levels;
  Real radius = 0.0;
  std::vector<Real> condition_a;          // pair norms per level
  std::vector<Real> condition_b;          // battery maxima per level
  std::vector<Real> condition_c;          // full-residual pairing vs finest
  std::vector<Real> condition_c_prime;    // competing-only pairing vs finest
  std::vector<Real> strong_convergence;   // ||u_l - u*||_{1,p1} + ||v_l - v*||_{1,p2}
  std::vector<EigenEstimate> lambda_p1, lambda_p2;
  std::vector<CheckReport> hypothesis_reports;
  bool all_converged = false;
  std::string failure;  // empty on success
};

/// Level-0 initial iterate. Reactions that vanish at the origin always admit
/// the zero branch; the sine seed steers Newton toward a nontrivial one.
enum class InitialIterate { Zero, Sine };

struct HierarchyControls {
  SolverOptions solver;
  std::optional<HypothesisConstants> constants;
  bool override_hypotheses = false;
  long check_samples = 100000;
  Real check_max_magnitude = 1e4;
  std::uint64_t seed = 42;
  int eigen_level_cap = 3;   // estimate eigenvalues up to this level
  Real eigen_tol = 1e-9;
  InitialIterate initial_iterate = InitialIterate::Sine;
};

/// Solves levels 0..levels-1, warm-starting each level by prolongation,
/// then assembles all diagnostics. The hierarchy must hold levels+1 meshes;
/// the extra mesh provides the next-finer assemblies for condition_b and the
/// cross-level residual. Failed levels leave a failure marker and a partial
/// report.
SolveReport run_hierarchy(const ProblemSpec& spec, const RefinementHierarchy& hierarchy,
                          int levels, Real tol, const HierarchyControls& controls = {});

/// Max over the battery of |<residual(u,v), (phi, 0)>| and |<residual(u,v),
/// (0, psi)>|. Battery functions may live on any hierarchy level; state and
/// battery are prolonged to the finest level involved before pairing.
Real check_weak_solution(const RefinementHierarchy& hierarchy, const PairState& state,
                         const ProblemSpec& spec, const std::vector<FemFunction>& battery);

/// Max-norm of the residual of `state` prolonged to `at_level` (pairings
/// against every hat of that level), i.e. the weak-solution measurement
/// against a basis outside the state's own Galerkin space.
Real cross_level_residual_linf(const RefinementHierarchy& hierarchy, const PairState& state,
                               const ProblemSpec& spec, int at_level);

/// |  ||u||_{1,p1}^{p1} - mu1 ||u||_{1,q1}^{q1} - <N_f1(u,v), u>  | and the
/// second-component analogue: the energy identities that hold at any
/// converged level solution.
std::pair<Real, Real> energy_identity_gap(const Mesh& mesh, const PairState& state,
                                          const ProblemSpec& spec);

}  // namespace pqsys
