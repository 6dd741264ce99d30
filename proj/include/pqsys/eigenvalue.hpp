#pragma once

#include "pqsys/femspace.hpp"
#include "pqsys/mesh.hpp"

namespace pqsys {

/// Discrete first-eigenvalue certificate for the r-Laplacian on the
/// zero-trace P1 space: lambda is the Rayleigh quotient
/// ||minimizer||_{1,r}^r / ||minimizer||_r^r of the returned minimizer,
/// which is normalized to ||minimizer||_r = 1.
struct EigenEstimate {
  Real r = 2.0;
  int level = 0;
  Real lambda = 0.0;
  FemFunction minimizer;
  int iterations = 0;
  Real residual = 0.0;  // final relative change of the quotient
};

struct EigenError : std::runtime_error {
  EigenError(const std::string& msg, EigenEstimate best)
      : std::runtime_error(msg), best(std::move(best)) {}
  EigenEstimate best;
};

/// Inverse iteration: repeatedly solve the regularized r-Laplacian problem
///   -div(|grad w|^{r-2} grad w) = lambda_k |u_k|^{r-2} u_k,
/// normalize in L^r, and update lambda by the Rayleigh quotient until its
/// relative change falls below tol. Starts from the nodal interpolant of
/// sin(pi x) sin(pi y). Throws EigenError carrying the best iterate on
/// non-convergence.
EigenEstimate estimate_lambda1(Real r, const RefinementHierarchy& hierarchy, int level, Real tol,
                               int max_iterations = 200);

/// Rayleigh quotient ||f||_{1,r}^r / ||f||_r^r of a nonzero discrete function.
Real rayleigh_quotient(const Mesh& mesh, const FemFunction& f, Real r);

}  // namespace pqsys
