#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eddylab/grid.hpp"
#include "eddylab/linalg.hpp"
#include "eddylab/vec.hpp"

namespace eddy {

// Node-sampled diffusivity a(x) = kappa I + (eddy part)/2. The eddy part is
// zero off the interior, so stencils that reach non-interior vertices see the
// bare molecular value there.
struct DiffusivityTensor {
  const Grid* grid = nullptr;
  double kappa = 0.0;
  std::vector<SymMat2> a;  // one per bounding-box node

  static DiffusivityTensor isotropic(const Grid& g, double kappa);

  SymMat2 at(int node) const { return a[node]; }
  // Adds s * I on interior nodes where mask is set (empty mask = everywhere).
  void add_isotropic(double s, const std::vector<uint8_t>& mask = {});
  void add(int node, const SymMat2& m) { a[node] += m; }
  // Throws unless a(x) - kappa I is PSD at every interior node.
  void validate(double tol = 1e-12) const;
};

enum class OperatorKind { Diffusion, Advection };

// Sparse operator over the interior unknowns, in the grid's row-major
// interior ordering. Diffusion operators are symmetric negative
// semidefinite; advection operators are exactly skew-symmetric.
struct DiscreteOperator {
  OperatorKind kind = OperatorKind::Diffusion;
  const Grid* grid = nullptr;
  double kappa = 0.0;
  uint64_t fingerprint = 0;
  CsrMatrix matrix;

  int size() const { return matrix.rows; }
  // out = op(f); non-interior entries of out stay zero
  void apply(const ScalarField& f, ScalarField& out) const;
  ScalarField apply(const ScalarField& f) const;
  // coordinate-format text dump (row col value per line) for inspection
  void write_triplets(std::ostream& os) const;
};

// Discretizes div(a grad .) with zero Dirichlet exterior by piecewise-linear
// elements on the two-triangle split of each grid cell, with the tensor
// averaged over each triangle's vertices, divided by the h^2 nodal mass.
// Symmetric NSD for any PSD tensor; reduces to the standard 5-point stencil
// when a is constant isotropic.
DiscreteOperator assemble_diffusion(const Grid& grid, const DiffusivityTensor& tensor);

// Discretizes f -> u . grad f as the average of the centered flux form
// div(u f) and the centered advective form, which is exactly skew-symmetric
// for any sampled u and consistent at O(h^2) when the discrete divergence of
// u is O(h^2).
DiscreteOperator assemble_advection(const Grid& grid, const VectorField& u);

// Matrix-free application of the same skew advection stencil that
// assemble_advection materializes: out = (u . grad f + div(u f)) / 2 with
// centered differences. This is the hot kernel of the noise step, so no
// matrix is built.
void apply_advection(const Grid& grid, const VectorField& u, const ScalarField& f,
                     ScalarField& out);

// Reference value of <f, A f> computed directly from nodal differences:
// -sum over triangles of area * (grad f)^T a_T (grad f). Used to certify the
// assembled matrix against the variational definition.
double diffusion_quadratic_form(const Grid& grid, const DiffusivityTensor& tensor,
                                const ScalarField& f);

// kappa I + (1/2) sum_j u_j(x) (x) u_j(x) sampled per node.
DiffusivityTensor tensor_from_basis(const Grid& grid, double kappa,
                                    const std::vector<VectorField>& basis);

struct ItoReport {
  double max_rel_residual = 0.0;
  double max_abs_residual = 0.0;
  int tests = 0;
};

// Certifies the corrector identity: (1/2) sum_j B_j(B_j f) against the
// assembled div((Q(x,x)/2) grad f) over a battery of test functions.
// Residuals are L2 norms relative to the diffusion side.
ItoReport ito_corrector_check(const Grid& grid, const std::vector<VectorField>& basis,
                              const std::vector<ScalarField>& test_functions);

}  // namespace eddy
