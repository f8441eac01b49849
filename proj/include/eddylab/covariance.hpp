#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "eddylab/elliptic.hpp"
#include "eddylab/grid.hpp"
#include "eddylab/vec.hpp"
#include "eddylab/vortex.hpp"

namespace eddy {

// Type-erased view of a finite velocity-field family on one grid, so the
// diagnostics below work for both a patch-stored vortex basis and a plain
// list of grid-wide fields. The view borrows the family; keep it alive.
struct FamilyView {
  const Grid* grid = nullptr;
  int count = 0;
  std::function<void(int, double, VectorField&)> accumulate;  // out += c*u_j
  std::function<double(int, const VectorField&)> pair;        // <u_j, v>
  std::function<Vec2(int, int)> value;                        // u_j at node
  // adds u_j(x) (x) u_j(x) into a per-box-node matrix array, touching only
  // the nodes where u_j lives
  std::function<void(int, std::vector<SymMat2>&)> scatter_outer;
};

FamilyView family_view(const VortexBasis& basis);
FamilyView family_view(const Grid& grid, const std::vector<VectorField>& fields);

// Q(x,x) = sum_j u_j(x) (x) u_j(x) at one node.
SymMat2 pointwise_Q(const FamilyView& fam, int node);

// Q(x,x) at every box node in one scatter pass.
std::vector<SymMat2> pointwise_Q_all(const FamilyView& fam);

// Smaller eigenvalue of Q(x,x) per node, by the closed-form 2x2 formula.
ScalarField q_field(const FamilyView& fam);

// (Qop v)(x) = sum_j u_j(x) <u_j, v>: the finite-rank covariance operator.
VectorField apply_Qop(const FamilyView& fam, const VectorField& v);

// Dense Gram matrix gram[i*count+j] = <u_i, u_j>; small families only.
std::vector<double> gram_matrix(const FamilyView& fam);

// kappa I + Q(x,x)/2: the diffusivity the Ito drift sees. Defined on every
// box node so boundary-adjacent elements get the same coefficient field.
DiffusivityTensor effective_tensor(const FamilyView& fam, double kappa);

struct EpsQ {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> coeffs;  // top eigenvector in coefficient space
};

// Top Gram eigenvalue, which equals the covariance operator norm: the
// operator factors through coefficient space, and both factor orders share
// the nonzero spectrum. Lanczos with the Gram matvec done matrix-free as
// synthesize-then-project, so no |basis|^2 storage ever exists.
EpsQ epsilon_Q(const FamilyView& fam, double rel_tol = 1e-8, int max_iter = 300);

struct CovarianceDiagnostics {
  std::vector<SymMat2> Qxx;   // per box node
  ScalarField q;
  double epsilon_Q = 0.0;
  std::vector<double> gram;   // dense, only when count <= gram_cap
  double trace_gram = 0.0;    // sum of squared member norms
  double trace_q_integral = 0.0;  // h^2 * sum over nodes of trace(Qxx)
};

CovarianceDiagnostics compute_diagnostics(const FamilyView& fam, int gram_cap = 512);

// Continuum Gram route for a basis of shifted copies of one profile: entries
// depend only on center separation through the autocorrelation kernel, so
// the Lanczos matvec is a windowed lattice cross-correlation. Same-class
// entries are structural zeros (kernel support ends before M/N). This is
// the route that speaks to the continuum operator norm; the grid route in
// epsilon_Q speaks to the sampled fields actually used by a simulation.
EpsQ epsilon_Q_lattice(const VortexProfile& profile, const VortexConfig& cfg,
                       const Lattice& lattice, double rel_tol = 1e-8,
                       int max_iter = 300);

struct CovarianceReport {
  double epsilon_Q = 0.0;
  double min_q_inner = 0.0;  // min of q over the doubled inner layer
  double trace = 0.0;
};

CovarianceReport covariance_report(const Grid& grid, const ScalarField& q,
                                   double epsilon_Q, double trace, double delta);

// One row per interior node: i, j, x, y, q.
void export_q_csv(std::ostream& os, const ScalarField& q);

}  // namespace eddy
