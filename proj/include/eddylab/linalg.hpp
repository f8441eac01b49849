#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace eddy {

// Compressed sparse row matrix. Rows and columns index the compact interior
// unknowns of a grid (or any caller-defined ordering).
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;   // size rows+1
  std::vector<int> col_idx;   // size nnz
  std::vector<double> vals;   // size nnz

  static CsrMatrix from_triplets(int rows, int cols,
                                 std::vector<std::pair<std::pair<int, int>, double>> trips);

  void multiply(const double* x, double* y) const;
  std::vector<double> multiply(const std::vector<double>& x) const;
  std::vector<double> diagonal() const;
  // max |A - A^T| entry, for symmetry checks
  double asymmetry() const;
  CsrMatrix scaled(double s) const;
  // this + s * other (sparsity union)
  CsrMatrix add_scaled(const CsrMatrix& other, double s) const;
  static CsrMatrix identity(int n);
};

struct CgResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

// Preconditioned conjugate gradient for SPD systems. The operator is a
// matvec callback so both explicit matrices and matrix-free operators fit.
// Convergence: ||b - Ax|| <= tol * ||b||. Jacobi preconditioning is used
// when diag is non-empty.
CgResult conjugate_gradient(const std::function<void(const double*, double*)>& apply, int n,
                            const double* b, double* x, double tol, int max_iter,
                            const std::vector<double>& diag = {});

// Scratch for the allocation-free overload below; resized on first use and
// reused across calls (time steppers call CG once per step).
struct CgWorkspace {
  std::vector<double> r, z, p, ap;
};

CgResult conjugate_gradient(const std::function<void(const double*, double*)>& apply, int n,
                            const double* b, double* x, double tol, int max_iter,
                            const std::vector<double>& diag, CgWorkspace& ws);

struct LanczosResult {
  double eigenvalue = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Largest eigenvalue of a symmetric operator by the Lanczos iteration with
// full reorthogonalization. Deterministic for a fixed seed. The returned
// Ritz value approaches the top eigenvalue from below. When eigenvector is
// non-null it receives the matching normalized Ritz vector.
LanczosResult lanczos_max_eigenvalue(const std::function<void(const double*, double*)>& apply,
                                     int n, double rel_tol, int max_iter, uint64_t seed,
                                     std::vector<double>* eigenvector = nullptr);

// Eigenvalues (ascending) and eigenvectors (columns) of a dense symmetric
// matrix by the cyclic Jacobi method. Intended for small oracle problems.
void dense_symmetric_eig(std::vector<double> a, int n, std::vector<double>& eigenvalues,
                         std::vector<double>& eigenvectors);

// Tridiagonal solve (Thomas algorithm). diag/lower/upper are the three bands;
// lower[0] and upper[n-1] are unused. The system must be diagonally
// dominant or SPD for stability.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

double vec_dot(const std::vector<double>& a, const std::vector<double>& b);
double vec_norm(const std::vector<double>& a);

// Gauss-Legendre quadrature nodes and weights on [-1, 1], generated by
// Newton iteration on the Legendre recurrence.
struct GaussRule {
  std::vector<double> x, w;
};
GaussRule gauss_legendre_rule(int n);

}  // namespace eddy
