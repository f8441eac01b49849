#include "eddylab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eddylab/linalg.hpp"

namespace eddy {

EigenResult principal_eigenvalue(const DiscreteOperator& op) {
  if (op.kind != OperatorKind::Diffusion)
    throw std::invalid_argument("principal_eigenvalue: needs a symmetric diffusion operator");
  const int n = op.size();
  if (n == 0) throw std::invalid_argument("principal_eigenvalue: empty operator");

  // -A is SPD; work with it directly
  auto apply_neg = [&](const double* x, double* y) {
    op.matrix.multiply(x, y);
    for (int i = 0; i < n; ++i) y[i] = -y[i];
  };
  std::vector<double> diag = op.matrix.diagonal();
  for (double& d : diag) d = -d;

  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> w(n), av(n);

  constexpr double target = 1e-9;
  constexpr int cap = 300;
  EigenResult res;
  for (int it = 0; it < cap; ++it) {
    std::copy(v.begin(), v.end(), w.begin());  // warm start
    const CgResult cg =
        conjugate_gradient(apply_neg, n, v.data(), w.data(), 1e-12, 100000, diag);
    if (!cg.converged) throw std::runtime_error("principal_eigenvalue: inner solve stalled");

    const double wn = vec_norm(w);
    for (int i = 0; i < n; ++i) v[i] = w[i] / wn;

    apply_neg(v.data(), av.data());
    const double lambda = vec_dot(v, av);
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ri = av[i] - lambda * v[i];
      r2 += ri * ri;
    }
    res.lambda = lambda;
    res.residual = std::sqrt(r2) / lambda;
    res.iterations = it + 1;
    if (res.residual <= target) break;
  }
  if (res.residual > 1e-8)
    throw std::runtime_error("principal_eigenvalue: iteration cap exceeded");

  // sign-normalize nonnegative and scale to unit grid L2 norm
  double s = 0.0;
  for (double x : v) s += x;
  if (s < 0.0)
    for (double& x : v) x = -x;

  res.eigenvector = ScalarField(*op.grid);
  const auto& ids = op.grid->interior_ids();
  const double scale = 1.0 / op.grid->h;  // Euclidean-unit -> grid-L2-unit
  for (size_t k = 0; k < ids.size(); ++k) res.eigenvector.v[ids[k]] = v[k] * scale;
  return res;
}

namespace {

struct Tridiag {
  std::vector<double> lower, diag, upper;  // lower[0], upper[n-1] unused

  explicit Tridiag(size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    const size_t n = diag.size();
    for (size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += lower[i] * x[i - 1];
      if (i + 1 < n) s += upper[i] * x[i + 1];
      y[i] = s;
    }
  }
};

}  // namespace

EigenResult radial_lambda(RadialProblem& p) {
  if (!(p.kappa > 0.0)) throw std::invalid_argument("radial_lambda: kappa must be positive");
  if (!(p.sigma2 >= 0.0)) throw std::invalid_argument("radial_lambda: sigma2 must be >= 0");
  if (!(p.delta > 0.0 && p.delta < 1.0))
    throw std::invalid_argument("radial_lambda: delta must lie in (0,1)");
  if (p.d < 1 || p.d > 3) throw std::invalid_argument("radial_lambda: d must be 1, 2 or 3");
  if (p.n_cells < 4) throw std::invalid_argument("radial_lambda: mesh too coarse");

  // mesh: uniform on [0, 1-delta] and on [1-delta, 1], node exactly at the jump
  const double split = 1.0 - p.delta;
  int m1 = static_cast<int>(std::lround(split * p.n_cells));
  m1 = std::clamp(m1, 1, p.n_cells - 1);
  const int m2 = p.n_cells - m1;
  const int nn = p.n_cells + 1;

  p.r.resize(nn);
  for (int i = 0; i <= m1; ++i) p.r[i] = split * i / m1;
  for (int i = 1; i <= m2; ++i) p.r[m1 + i] = split + p.delta * i / m2;
  p.r[m1] = split;
  p.r[p.n_cells] = 1.0;

  // piecewise-linear elements with the r^{d-1} weight integrated exactly
  // (3-point Gauss on each cell covers the degree <= 4 mass integrands)
  const int nu = p.n_cells;  // unknowns: all nodes except r = 1
  Tridiag K(nu), M(nu);
  static const double gp[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  for (int e = 0; e < p.n_cells; ++e) {
    const double rl = p.r[e], rr = p.r[e + 1], he = rr - rl;
    const double mid = 0.5 * (rl + rr);
    const double a = p.kappa + (mid < split ? p.sigma2 : 0.0);

    const double wpow = (std::pow(rr, p.d) - std::pow(rl, p.d)) / p.d;
    const double ke = a * wpow / (he * he);

    double m00 = 0.0, m01 = 0.0, m11 = 0.0;
    for (int q = 0; q < 3; ++q) {
      const double r = mid + 0.5 * he * gp[q];
      const double wq = 0.5 * he * gw[q] * std::pow(r, p.d - 1);
      const double phl = (rr - r) / he, phr = (r - rl) / he;
      m00 += wq * phl * phl;
      m01 += wq * phl * phr;
      m11 += wq * phr * phr;
    }

    K.diag[e] += ke;
    M.diag[e] += m00;
    if (e + 1 < nu) {
      K.diag[e + 1] += ke;
      K.lower[e + 1] -= ke;
      K.upper[e] -= ke;
      M.diag[e + 1] += m11;
      M.lower[e + 1] += m01;
      M.upper[e] += m01;
    }
  }

  // inverse iteration on K v = lambda M v. The convergence measure is the
  // backward error ||Kv - lambda Mv|| / ((||K|| + lambda||M||) ||v||), whose
  // rounding floor is machine epsilon regardless of how large the layered
  // stiffness entries get; a plain residual over lambda would bottom out far
  // above any fixed tolerance for sigma2 >> kappa.
  auto inf_norm = [nu](const Tridiag& t) {
    double m = 0.0;
    for (int i = 0; i < nu; ++i)
      m = std::max(m, std::abs(t.lower[i]) + std::abs(t.diag[i]) + std::abs(t.upper[i]));
    return m;
  };
  const double norm_k = inf_norm(K), norm_m = inf_norm(M);

  std::vector<double> v(nu, 1.0), w(nu), kv(nu), mv(nu);
  EigenResult res;
  constexpr double target = 1e-13;
  constexpr int cap = 5000;
  double prev = 0.0;
  for (int it = 0; it < cap; ++it) {
    M.multiply(v, mv);
    w = solve_tridiagonal(K.lower, K.diag, K.upper, mv);
    M.multiply(w, mv);
    const double mn = std::sqrt(vec_dot(w, mv));
    for (int i = 0; i < nu; ++i) v[i] = w[i] / mn;

    K.multiply(v, kv);
    M.multiply(v, mv);
    const double lambda = vec_dot(v, kv) / vec_dot(v, mv);
    double r2 = 0.0;
    for (int i = 0; i < nu; ++i) {
      const double ri = kv[i] - lambda * mv[i];
      r2 += ri * ri;
    }
    res.lambda = lambda;
    res.residual = std::sqrt(r2) / ((norm_k + lambda * norm_m) * vec_norm(v));
    res.iterations = it + 1;
    if (res.residual <= target) break;
    if (it > 2 && std::abs(lambda - prev) <= 1e-14 * lambda && res.residual <= 1e-8) break;
    prev = lambda;
  }
  if (res.residual > 1e-8) throw std::runtime_error("radial_lambda: iteration cap exceeded");

  // nonnegative sign, then normalize int f^2 r^{d-1} = 1/omega_d
  double s = 0.0;
  for (double x : v) s += x;
  if (s < 0.0)
    for (double& x : v) x = -x;
  M.multiply(v, mv);
  const double scale = 1.0 / std::sqrt(sphere_surface_measure(p.d) * vec_dot(v, mv));
  p.f.assign(nn, 0.0);
  for (int i = 0; i < nu; ++i) p.f[i] = v[i] * scale;
  return res;
}

TheoremBounds theorem_bounds(double kappa, double sigma2, double delta, int d) {
  if (!(kappa > 0.0 && sigma2 > 0.0 && delta > 0.0 && d > 0))
    throw std::invalid_argument("theorem_bounds: inputs must be positive");
  TheoremBounds b;
  b.bound_asym = kappa * d * sigma2 / (kappa + delta * sigma2);
  b.bound_min = 0.5 * d * std::min(sigma2, kappa / delta);
  return b;
}

double sphere_surface_measure(int d) {
  if (d < 1) throw std::invalid_argument("sphere_surface_measure: d must be positive");
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace eddy
