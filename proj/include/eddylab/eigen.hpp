#pragma once

#include <vector>

#include "eddylab/elliptic.hpp"
#include "eddylab/grid.hpp"

namespace eddy {

struct EigenResult {
  double lambda = 0.0;
  // Unit L2 norm, sign-normalized nonnegative. Empty (null grid) for the
  // radial 1D solves, whose minimizer lives in RadialProblem::f instead.
  ScalarField eigenvector;
  int iterations = 0;
  double residual = 0.0;  // ||(-A)v - lambda v|| / lambda, at most 1e-8
};

// The radial lower-bound problem on the unit ball: minimize
//   J(f) = kappa int_0^1 f'^2 r^{d-1} + sigma2 int_0^{1-delta} f'^2 r^{d-1}
// over f(1) = 0 with int_0^1 f^2 r^{d-1} = 1/omega_d. The minimum value of
// omega_d J equals the lowest eigenvalue of the Sturm-Liouville problem
//   -(a(r) r^{d-1} f')' = lambda r^{d-1} f,  a = kappa + sigma2 1_{r<1-delta},
// with a natural condition at 0 and Dirichlet at 1.
struct RadialProblem {
  double kappa = 0.0;
  double sigma2 = 0.0;
  double delta = 0.0;  // in (0,1); the coefficient drops to kappa past 1-delta
  int d = 2;
  int n_cells = 0;
  // Filled by radial_lambda: the mesh (always with a node exactly at
  // 1-delta) and the normalized, nonnegative, non-increasing minimizer.
  std::vector<double> r;
  std::vector<double> f;
};

// Smallest eigenvalue of -op by inverse power iteration with conjugate
// gradient inner solves. op must be a symmetric diffusion operator.
EigenResult principal_eigenvalue(const DiscreteOperator& op);

// Lowest eigenvalue of the radial problem by piecewise-linear finite
// elements on a mesh aligned to the coefficient jump, with inverse
// iteration on the generalized tridiagonal pencil.
EigenResult radial_lambda(RadialProblem& p);

struct TheoremBounds {
  double bound_asym = 0.0;  // kappa d sigma2 / (kappa + delta sigma2)
  double bound_min = 0.0;   // (d/2) min(sigma2, kappa/delta)
};

TheoremBounds theorem_bounds(double kappa, double sigma2, double delta, int d);

// Surface measure of the unit sphere in R^d: 2, 2pi, 4pi, ...
double sphere_surface_measure(int d);

}  // namespace eddy
