#include "eddylab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eddylab/rng.hpp"

namespace eddy {

CsrMatrix CsrMatrix::from_triplets(
    int rows, int cols, std::vector<std::pair<std::pair<int, int>, double>> trips) {
  // stable: duplicates merge in insertion order, so assemblies that emit
  // mirrored (r,c)/(c,r) contributions stay exactly symmetric after rounding
  std::stable_sort(trips.begin(), trips.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  size_t k = 0;
  while (k < trips.size()) {
    // merge duplicates
    size_t k2 = k + 1;
    double v = trips[k].second;
    while (k2 < trips.size() && trips[k2].first == trips[k].first) v += trips[k2++].second;
    const auto [r, c] = trips[k].first;
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::invalid_argument("from_triplets: index out of range");
    m.col_idx.push_back(c);
    m.vals.push_back(v);
    m.row_ptr[r + 1]++;
    k = k2;
  }
  for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

void CsrMatrix::multiply(const double* x, double* y) const {
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[col_idx[k]];
    y[r] = s;
  }
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(rows);
  multiply(x.data(), y.data());
  return y;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      if (col_idx[k] == r) d[r] = vals[k];
  return d;
}

double CsrMatrix::asymmetry() const {
  // Build a transpose lookup and compare entries.
  double worst = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const int c = col_idx[k];
      double vt = 0.0;
      for (int k2 = row_ptr[c]; k2 < row_ptr[c + 1]; ++k2)
        if (col_idx[k2] == r) {
          vt = vals[k2];
          break;
        }
      worst = std::max(worst, std::abs(vals[k] - vt));
    }
  }
  return worst;
}

CsrMatrix CsrMatrix::scaled(double s) const {
  CsrMatrix m = *this;
  for (double& v : m.vals) v *= s;
  return m;
}

CsrMatrix CsrMatrix::add_scaled(const CsrMatrix& other, double s) const {
  if (rows != other.rows || cols != other.cols)
    throw std::invalid_argument("add_scaled: shape mismatch");
  std::vector<std::pair<std::pair<int, int>, double>> trips;
  trips.reserve(vals.size() + other.vals.size());
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      trips.push_back({{r, col_idx[k]}, vals[k]});
  for (int r = 0; r < other.rows; ++r)
    for (int k = other.row_ptr[r]; k < other.row_ptr[r + 1]; ++k)
      trips.push_back({{r, other.col_idx[k]}, s * other.vals[k]});
  return from_triplets(rows, cols, std::move(trips));
}

CsrMatrix CsrMatrix::identity(int n) {
  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.resize(n + 1);
  m.col_idx.resize(n);
  m.vals.assign(n, 1.0);
  for (int i = 0; i <= n; ++i) m.row_ptr[i] = i;
  for (int i = 0; i < n; ++i) m.col_idx[i] = i;
  return m;
}

CgResult conjugate_gradient(const std::function<void(const double*, double*)>& apply, int n,
                            const double* b, double* x, double tol, int max_iter,
                            const std::vector<double>& diag) {
  CgWorkspace ws;
  return conjugate_gradient(apply, n, b, x, tol, max_iter, diag, ws);
}

CgResult conjugate_gradient(const std::function<void(const double*, double*)>& apply, int n,
                            const double* b, double* x, double tol, int max_iter,
                            const std::vector<double>& diag, CgWorkspace& ws) {
  ws.r.resize(n);
  ws.z.resize(n);
  ws.p.resize(n);
  ws.ap.resize(n);
  std::vector<double>&r = ws.r, &z = ws.z, &p = ws.p, &ap = ws.ap;
  const bool precond = !diag.empty();

  apply(x, ap.data());
  for (int i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  double bnorm = 0.0;
  for (int i = 0; i < n; ++i) bnorm += b[i] * b[i];
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    std::fill(x, x + n, 0.0);
    return {true, 0, 0.0};
  }

  auto apply_precond = [&](const std::vector<double>& rin, std::vector<double>& zout) {
    if (precond)
      for (int i = 0; i < n; ++i) zout[i] = rin[i] / diag[i];
    else
      zout = rin;
  };

  apply_precond(r, z);
  p = z;
  double rz = vec_dot(r, z);
  double rnorm = vec_norm(r);

  CgResult res;
  for (int it = 0; it < max_iter; ++it) {
    if (rnorm <= tol * bnorm) {
      res.converged = true;
      break;
    }
    apply(p.data(), ap.data());
    const double pap = vec_dot(p, ap);
    if (pap <= 0.0) throw std::runtime_error("conjugate_gradient: operator not SPD");
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    apply_precond(r, z);
    const double rz_new = vec_dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = vec_norm(r);
    res.iterations = it + 1;
  }
  res.converged = res.converged || rnorm <= tol * bnorm;
  res.relative_residual = rnorm / bnorm;
  return res;
}

LanczosResult lanczos_max_eigenvalue(const std::function<void(const double*, double*)>& apply,
                                     int n, double rel_tol, int max_iter, uint64_t seed,
                                     std::vector<double>* eigenvector) {
  if (n <= 0) throw std::invalid_argument("lanczos: empty operator");
  max_iter = std::min(max_iter, n);

  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> v(n), w(n);

  CounterRng rng(seed);
  for (int i = 0; i < n; ++i) v[i] = rng.normal(0, static_cast<uint64_t>(i), 0);
  double nv = vec_norm(v);
  for (double& x : v) x /= nv;

  double prev = 0.0;
  LanczosResult res;
  std::vector<double> ritz;  // top tridiagonal eigenvector, for reconstruction
  for (int it = 0; it < max_iter; ++it) {
    basis.push_back(v);
    apply(v.data(), w.data());
    const double a = vec_dot(v, w);
    alpha.push_back(a);

    // w <- w - a v - beta_prev v_prev, then full reorthogonalization
    for (int i = 0; i < n; ++i) w[i] -= a * v[i];
    if (!beta.empty()) {
      const auto& vprev = basis[basis.size() - 2];
      const double bp = beta.back();
      for (int i = 0; i < n; ++i) w[i] -= bp * vprev[i];
    }
    for (const auto& q : basis) {
      const double c = vec_dot(q, w);
      for (int i = 0; i < n; ++i) w[i] -= c * q[i];
    }

    // top eigenvalue of the tridiagonal (alpha, beta) by bisection-free QL is
    // overkill; use dense Jacobi on the small tridiagonal matrix instead
    const int m = static_cast<int>(alpha.size());
    std::vector<double> t(m * m, 0.0);
    for (int i = 0; i < m; ++i) t[i * m + i] = alpha[i];
    for (int i = 0; i + 1 < m; ++i) t[i * m + i + 1] = t[(i + 1) * m + i] = beta[i];
    std::vector<double> ev, evec;
    dense_symmetric_eig(std::move(t), m, ev, evec);
    const double cur = ev.back();
    res.eigenvalue = cur;
    res.iterations = it + 1;
    if (eigenvector) {
      ritz.assign(m, 0.0);
      for (int k = 0; k < m; ++k) ritz[k] = evec[k * m + (m - 1)];
    }

    if (it > 0 && std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) {
      res.converged = true;
      break;
    }
    prev = cur;

    const double b = vec_norm(w);
    if (b < 1e-14 * std::max(1.0, std::abs(a))) {
      // invariant subspace found: the Ritz value is exact
      res.converged = true;
      break;
    }
    beta.push_back(b);
    for (int i = 0; i < n; ++i) v[i] = w[i] / b;
  }
  if (eigenvector) {
    eigenvector->assign(n, 0.0);
    for (size_t k = 0; k < ritz.size(); ++k)
      for (int i = 0; i < n; ++i) (*eigenvector)[i] += ritz[k] * basis[k][i];
    const double nv2 = vec_norm(*eigenvector);
    if (nv2 > 0.0)
      for (double& x : *eigenvector) x /= nv2;
  }
  return res;
}

void dense_symmetric_eig(std::vector<double> a, int n, std::vector<double>& eigenvalues,
                         std::vector<double>& eigenvectors) {
  eigenvectors.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) eigenvectors[i * n + i] = 1.0;

  auto idx = [n](int r, int c) { return r * n + c; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[idx(p, q)] * a[idx(p, q)];
    if (off < 1e-28 * n * n) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[idx(p, q)];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[idx(k, p)], akq = a[idx(k, q)];
          a[idx(k, p)] = c * akp - s * akq;
          a[idx(k, q)] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[idx(p, k)], aqk = a[idx(q, k)];
          a[idx(p, k)] = c * apk - s * aqk;
          a[idx(q, k)] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = eigenvectors[idx(k, p)], vkq = eigenvectors[idx(k, q)];
          eigenvectors[idx(k, p)] = c * vkp - s * vkq;
          eigenvectors[idx(k, q)] = s * vkp + c * vkq;
        }
      }
    }
  }

  // sort ascending, permuting eigenvector columns alongside
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a[idx(x, x)] < a[idx(y, y)]; });
  eigenvalues.resize(n);
  std::vector<double> sorted_vecs(n * n);
  for (int c = 0; c < n; ++c) {
    eigenvalues[c] = a[idx(order[c], order[c])];
    for (int r = 0; r < n; ++r) sorted_vecs[idx(r, c)] = eigenvectors[idx(r, order[c])];
  }
  eigenvectors = std::move(sorted_vecs);
}

std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
  const size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("solve_tridiagonal: band size mismatch");
  for (size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = static_cast<int>(n) - 2; i >= 0; --i)
    x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double vec_norm(const std::vector<double>& a) { return std::sqrt(vec_dot(a, a)); }

GaussRule gauss_legendre_rule(int n) {
  constexpr double pi = 3.141592653589793238462643383279502884;
  GaussRule g;
  g.x.assign(n, 0.0);
  g.w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    g.w[i] = w;
    g.w[n - 1 - i] = w;
  }
  return g;
}

}  // namespace eddy
