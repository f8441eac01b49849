#include "eddylab/linalg.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

using namespace eddy;

namespace {

// 1D Dirichlet second-difference matrix (2 on the diagonal, -1 off), whose
// spectrum 2 - 2cos(k pi / (n+1)) is known in closed form.
CsrMatrix laplacian_1d(int n) {
  std::vector<std::pair<std::pair<int, int>, double>> trips;
  for (int i = 0; i < n; ++i) {
    trips.push_back({{i, i}, 2.0});
    if (i > 0) trips.push_back({{i, i - 1}, -1.0});
    if (i + 1 < n) trips.push_back({{i, i + 1}, -1.0});
  }
  return CsrMatrix::from_triplets(n, n, std::move(trips));
}

}  // namespace

TEST_CASE("csr assembly merges duplicate triplets") {
  auto m = CsrMatrix::from_triplets(2, 2, {{{0, 0}, 0.5},
                                           {{0, 1}, 2.0},
                                           {{1, 0}, 3.0},
                                           {{1, 1}, 4.0},
                                           {{0, 0}, 0.5}});
  const auto y = m.multiply({1.0, 10.0});
  CHECK(y[0] == doctest::Approx(21.0));
  CHECK(y[1] == doctest::Approx(43.0));
  CHECK(m.vals.size() == 4);
  CHECK(m.diagonal() == std::vector<double>{1.0, 4.0});
}

TEST_CASE("csr asymmetry measure") {
  CHECK(laplacian_1d(5).asymmetry() == 0.0);
  auto m = CsrMatrix::from_triplets(2, 2, {{{0, 1}, 1.0}});
  CHECK(m.asymmetry() == doctest::Approx(1.0));
}

TEST_CASE("csr linear combinations act like the sum of operators") {
  const auto a = laplacian_1d(6);
  const auto b = CsrMatrix::identity(6);
  const auto c = a.add_scaled(b, -0.5);
  std::vector<double> x(6);
  for (int i = 0; i < 6; ++i) x[i] = std::sin(1.0 + i);
  const auto ax = a.multiply(x);
  const auto cx = c.multiply(x);
  for (int i = 0; i < 6; ++i) CHECK(cx[i] == doctest::Approx(ax[i] - 0.5 * x[i]).epsilon(1e-14));

  const auto s = a.scaled(3.0);
  const auto sx = s.multiply(x);
  for (int i = 0; i < 6; ++i) CHECK(sx[i] == doctest::Approx(3.0 * ax[i]).epsilon(1e-14));
}

TEST_CASE("conjugate gradient solves an SPD system to the requested residual") {
  const int n = 50;
  const auto a = laplacian_1d(n);
  std::vector<double> xref(n), b(n), x(n, 0.0);
  for (int i = 0; i < n; ++i) xref[i] = std::cos(0.37 * i);
  a.multiply(xref.data(), b.data());

  auto apply = [&](const double* in, double* out) { a.multiply(in, out); };

  SUBCASE("plain") {
    const auto res = conjugate_gradient(apply, n, b.data(), x.data(), 1e-12, 500);
    CHECK(res.converged);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xref[i]).epsilon(1e-8));
  }

  SUBCASE("jacobi preconditioning handles a badly scaled diagonal") {
    // rescale rows/cols: D A D with D = diag(1..n) keeps symmetry
    std::vector<std::pair<std::pair<int, int>, double>> trips;
    for (int r = 0; r < n; ++r)
      for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
        trips.push_back({{r, a.col_idx[k]}, (r + 1.0) * a.vals[k] * (a.col_idx[k] + 1.0)});
    const auto s = CsrMatrix::from_triplets(n, n, std::move(trips));
    std::vector<double> bs(n);
    s.multiply(xref.data(), bs.data());
    auto apply_s = [&](const double* in, double* out) { s.multiply(in, out); };

    std::fill(x.begin(), x.end(), 0.0);
    const auto plain = conjugate_gradient(apply_s, n, bs.data(), x.data(), 1e-10, 5000);
    std::fill(x.begin(), x.end(), 0.0);
    const auto pc = conjugate_gradient(apply_s, n, bs.data(), x.data(), 1e-10, 5000, s.diagonal());
    CHECK(pc.converged);
    CHECK(pc.iterations < plain.iterations);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xref[i]).epsilon(1e-6));
  }

  SUBCASE("zero right-hand side returns zero immediately") {
    std::vector<double> zero(n, 0.0);
    std::fill(x.begin(), x.end(), 1.0);
    const auto res = conjugate_gradient(apply, n, zero.data(), x.data(), 1e-12, 10);
    CHECK(res.converged);
    for (int i = 0; i < n; ++i) CHECK(x[i] == 0.0);
  }
}

TEST_CASE("conjugate gradient rejects indefinite operators") {
  auto apply = [](const double* in, double* out) {
    out[0] = -in[0];
    out[1] = -in[1];
  };
  std::vector<double> b = {1.0, 2.0}, x = {0.0, 0.0};
  CHECK_THROWS(conjugate_gradient(apply, 2, b.data(), x.data(), 1e-10, 10));
}

TEST_CASE("lanczos reproduces the known top eigenvalue of the second-difference matrix") {
  const int n = 40;
  const auto a = laplacian_1d(n);
  auto apply = [&](const double* in, double* out) { a.multiply(in, out); };
  const auto res = lanczos_max_eigenvalue(apply, n, 1e-12, n, 7);
  const double exact = 2.0 - 2.0 * std::cos(n * M_PI / (n + 1));
  CHECK(res.converged);
  CHECK(res.eigenvalue == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("lanczos is deterministic for a fixed seed") {
  const int n = 30;
  const auto a = laplacian_1d(n);
  auto apply = [&](const double* in, double* out) { a.multiply(in, out); };
  const auto r1 = lanczos_max_eigenvalue(apply, n, 1e-10, n, 42);
  const auto r2 = lanczos_max_eigenvalue(apply, n, 1e-10, n, 42);
  CHECK(r1.eigenvalue == r2.eigenvalue);
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("dense jacobi eigensolver on a matrix with closed-form spectrum") {
  // tridiag(-1, 2, -1) of size 3: eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2)
  std::vector<double> a = {2, -1, 0, -1, 2, -1, 0, -1, 2};
  std::vector<double> ev, evec;
  dense_symmetric_eig(a, 3, ev, evec);
  CHECK(ev[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));

  // residual ||A v - lambda v|| for each eigenpair
  std::vector<double> a0 = {2, -1, 0, -1, 2, -1, 0, -1, 2};
  for (int c = 0; c < 3; ++c) {
    for (int r = 0; r < 3; ++r) {
      double av = 0.0;
      for (int k = 0; k < 3; ++k) av += a0[r * 3 + k] * evec[k * 3 + c];
      CHECK(av == doctest::Approx(ev[c] * evec[r * 3 + c]).epsilon(1e-10));
    }
  }
}

TEST_CASE("thomas solve inverts a tridiagonal system") {
  const int n = 20;
  std::vector<double> lower(n, -1.0), diag(n, 3.0), upper(n, -1.0), xref(n);
  for (int i = 0; i < n; ++i) xref[i] = std::sin(0.9 * i) + 2.0;
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs[i] = diag[i] * xref[i];
    if (i > 0) rhs[i] += lower[i] * xref[i - 1];
    if (i + 1 < n) rhs[i] += upper[i] * xref[i + 1];
  }
  const auto x = solve_tridiagonal(lower, diag, upper, rhs);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xref[i]).epsilon(1e-12));
}
