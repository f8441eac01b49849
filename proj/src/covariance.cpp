#include "eddylab/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "eddylab/linalg.hpp"

namespace eddy {

FamilyView family_view(const VortexBasis& basis) {
  FamilyView f;
  f.grid = basis.grid;
  f.count = basis.size();
  const VortexBasis* b = &basis;
  f.accumulate = [b](int j, double c, VectorField& out) { b->accumulate(j, c, out); };
  f.pair = [b](int j, const VectorField& v) { return b->pair(j, v); };
  f.value = [b](int j, int node) { return b->value(j, node); };
  f.scatter_outer = [b](int j, std::vector<SymMat2>& q) {
    const VortexBasis::Patch& p = b->patches[j];
    const Grid& g = *b->grid;
    for (int jj = 0; jj < p.nj; ++jj) {
      const int base = g.id(p.i0, p.j0 + jj);
      const double* ux = &p.ux[static_cast<size_t>(jj) * p.ni];
      const double* uy = &p.uy[static_cast<size_t>(jj) * p.ni];
      for (int ii = 0; ii < p.ni; ++ii) {
        SymMat2& m = q[base + ii];
        m.a11 += ux[ii] * ux[ii];
        m.a12 += ux[ii] * uy[ii];
        m.a22 += uy[ii] * uy[ii];
      }
    }
  };
  return f;
}

FamilyView family_view(const Grid& grid, const std::vector<VectorField>& fields) {
  for (const auto& u : fields) check_same_grid(&grid, u.grid);
  FamilyView f;
  f.grid = &grid;
  f.count = static_cast<int>(fields.size());
  const std::vector<VectorField>* fs = &fields;
  const Grid* g = &grid;
  f.accumulate = [fs](int j, double c, VectorField& out) {
    const VectorField& u = (*fs)[j];
    for (size_t k = 0; k < u.x.size(); ++k) {
      out.x[k] += c * u.x[k];
      out.y[k] += c * u.y[k];
    }
  };
  f.pair = [fs](int j, const VectorField& v) { return dot((*fs)[j], v); };
  f.value = [fs](int j, int node) { return (*fs)[j].at(node); };
  f.scatter_outer = [fs, g](int j, std::vector<SymMat2>& q) {
    const VectorField& u = (*fs)[j];
    for (int node = 0; node < g->box_count(); ++node) {
      if (u.x[node] == 0.0 && u.y[node] == 0.0) continue;
      SymMat2& m = q[node];
      m.a11 += u.x[node] * u.x[node];
      m.a12 += u.x[node] * u.y[node];
      m.a22 += u.y[node] * u.y[node];
    }
  };
  return f;
}

SymMat2 pointwise_Q(const FamilyView& fam, int node) {
  SymMat2 q{0.0, 0.0, 0.0};
  for (int j = 0; j < fam.count; ++j) {
    const Vec2 u = fam.value(j, node);
    q.a11 += u.x * u.x;
    q.a12 += u.x * u.y;
    q.a22 += u.y * u.y;
  }
  return q;
}

std::vector<SymMat2> pointwise_Q_all(const FamilyView& fam) {
  std::vector<SymMat2> q(fam.grid->box_count(), SymMat2{0.0, 0.0, 0.0});
  for (int j = 0; j < fam.count; ++j) fam.scatter_outer(j, q);
  return q;
}

DiffusivityTensor effective_tensor(const FamilyView& fam, double kappa) {
  DiffusivityTensor t = DiffusivityTensor::isotropic(*fam.grid, kappa);
  const auto qxx = pointwise_Q_all(fam);
  for (int node = 0; node < fam.grid->box_count(); ++node)
    t.add(node, SymMat2{0.5 * qxx[node].a11, 0.5 * qxx[node].a12, 0.5 * qxx[node].a22});
  return t;
}

ScalarField q_field(const FamilyView& fam) {
  const auto qxx = pointwise_Q_all(fam);
  ScalarField q(*fam.grid);
  for (int node = 0; node < fam.grid->box_count(); ++node)
    q.v[node] = qxx[node].eig_min();
  return q;
}

VectorField apply_Qop(const FamilyView& fam, const VectorField& v) {
  check_same_grid(fam.grid, v.grid);
  VectorField out(*fam.grid);
  for (int j = 0; j < fam.count; ++j) {
    const double c = fam.pair(j, v);
    if (c != 0.0) fam.accumulate(j, c, out);
  }
  return out;
}

std::vector<double> gram_matrix(const FamilyView& fam) {
  const int n = fam.count;
  std::vector<double> g(static_cast<size_t>(n) * n, 0.0);
  // one synthesis per column; keeps the cost linear in patch sizes
  VectorField col(*fam.grid);
  for (int j = 0; j < n; ++j) {
    col.clear();
    fam.accumulate(j, 1.0, col);
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i) * n + j] = fam.pair(i, col);
  }
  // exact symmetrization: <u_i, u_j> and <u_j, u_i> are the same sum in a
  // different order, so average away the rounding skew
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * (g[static_cast<size_t>(i) * n + j] +
                              g[static_cast<size_t>(j) * n + i]);
      g[static_cast<size_t>(i) * n + j] = g[static_cast<size_t>(j) * n + i] = s;
    }
  return g;
}

EpsQ epsilon_Q(const FamilyView& fam, double rel_tol, int max_iter) {
  EpsQ r;
  if (fam.count == 0) return r;
  VectorField synth(*fam.grid);
  auto matvec = [&fam, &synth](const double* c, double* out) {
    synth.clear();
    for (int j = 0; j < fam.count; ++j)
      if (c[j] != 0.0) fam.accumulate(j, c[j], synth);
    for (int j = 0; j < fam.count; ++j) out[j] = fam.pair(j, synth);
  };
  const LanczosResult lr =
      lanczos_max_eigenvalue(matvec, fam.count, rel_tol, max_iter, 0x5eedc0deULL, &r.coeffs);
  r.value = lr.eigenvalue;
  r.iterations = lr.iterations;
  r.converged = lr.converged;
  return r;
}

EpsQ epsilon_Q_lattice(const VortexProfile& profile, const VortexConfig& cfg,
                       const Lattice& lattice, double rel_tol, int max_iter) {
  EpsQ r;
  const int n = lattice.size();
  if (n == 0) return r;

  // dense coordinate map over the lattice's integer bounding box
  int kmin = lattice.coords[0].first, kmax = kmin;
  int hmin = lattice.coords[0].second, hmax = hmin;
  for (const auto& [k, h] : lattice.coords) {
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
  }
  const int W = kmax - kmin + 1, H = hmax - hmin + 1;
  std::vector<int> at(static_cast<size_t>(W) * H, -1);
  for (int j = 0; j < n; ++j) {
    const auto& [k, h] = lattice.coords[j];
    at[static_cast<size_t>(h - hmin) * W + (k - kmin)] = j;
  }

  // Gram entries depend on center separation only: G = Gamma^2 cw(|dz|/r),
  // zero once |dz| reaches twice the support radius. The diagonal uses the
  // piecewise-analytic norm instead of the generic quadrature at 0.
  const double g2 = cfg.Gamma * cfg.Gamma;
  const double cut = 2.0 * profile.support_radius * cfg.r;
  const int reach = static_cast<int>(std::floor(cut * cfg.N)) + 1;
  struct Off {
    int dk, dh;
    double w;
  };
  std::vector<Off> offs;
  for (int dh = -reach; dh <= reach; ++dh)
    for (int dk = -reach; dk <= reach; ++dk) {
      if (dk == 0 && dh == 0) continue;
      const double dist = std::hypot(dk, dh) / cfg.N;
      if (dist >= cut) continue;
      const double w = g2 * profile.cw(dist / cfg.r);
      if (w != 0.0) offs.push_back({dk, dh, w});
    }
  const double diag = g2 * profile.norm_w_sq;

  auto matvec = [&](const double* c, double* out) {
    for (int j = 0; j < n; ++j) {
      const auto& [k, h] = lattice.coords[j];
      double acc = diag * c[j];
      for (const Off& o : offs) {
        const int kk = k + o.dk - kmin, hh = h + o.dh - hmin;
        if (kk < 0 || kk >= W || hh < 0 || hh >= H) continue;
        const int idx = at[static_cast<size_t>(hh) * W + kk];
        if (idx >= 0) acc += o.w * c[idx];
      }
      out[j] = acc;
    }
  };
  const LanczosResult lr =
      lanczos_max_eigenvalue(matvec, n, rel_tol, max_iter, 0x1a77EcefULL, &r.coeffs);
  r.value = lr.eigenvalue;
  r.iterations = lr.iterations;
  r.converged = lr.converged;
  return r;
}

CovarianceDiagnostics compute_diagnostics(const FamilyView& fam, int gram_cap) {
  CovarianceDiagnostics d;
  d.Qxx = pointwise_Q_all(fam);
  d.q = ScalarField(*fam.grid);
  const double h2 = fam.grid->h * fam.grid->h;
  for (int node = 0; node < fam.grid->box_count(); ++node) {
    d.q.v[node] = d.Qxx[node].eig_min();
    if (fam.grid->interior(node)) d.trace_q_integral += h2 * d.Qxx[node].trace();
  }
  d.epsilon_Q = epsilon_Q(fam).value;
  if (fam.count <= gram_cap) {
    d.gram = gram_matrix(fam);
    for (int i = 0; i < fam.count; ++i)
      d.trace_gram += d.gram[static_cast<size_t>(i) * fam.count + i];
  } else {
    VectorField synth(*fam.grid);
    for (int j = 0; j < fam.count; ++j) {
      synth.clear();
      fam.accumulate(j, 1.0, synth);
      d.trace_gram += fam.pair(j, synth);
    }
  }
  return d;
}

CovarianceReport covariance_report(const Grid& grid, const ScalarField& q,
                                   double epsilon_Q, double trace, double delta) {
  CovarianceReport rep;
  rep.epsilon_Q = epsilon_Q;
  rep.trace = trace;
  const auto mask = inner_layer_mask(grid, 2.0 * delta);
  double mn = 0.0;
  bool seen = false;
  for (int node = 0; node < grid.box_count(); ++node) {
    if (!mask[node]) continue;
    if (!seen || q.v[node] < mn) mn = q.v[node];
    seen = true;
  }
  rep.min_q_inner = seen ? mn : 0.0;
  return rep;
}

void export_q_csv(std::ostream& os, const ScalarField& q) {
  const Grid& g = *q.grid;
  os << "i,j,x,y,q\n" << std::setprecision(17);
  for (int node : g.interior_ids()) {
    const int i = node % g.nb + g.i0, j = node / g.nb + g.i0;
    const Vec2 p = g.pos(node);
    os << i << ',' << j << ',' << p.x << ',' << p.y << ',' << q.v[node] << '\n';
  }
}

}  // namespace eddy
