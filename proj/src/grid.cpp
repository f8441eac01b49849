#include "eddylab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace eddy {

bool Domain::inside(const Vec2& p) const {
  switch (kind) {
    case DomainKind::UnitSquare:
      return p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0;
    case DomainKind::UnitDisk:
      return p.norm2() < 1.0;
  }
  return false;
}

double Domain::signed_boundary_distance(const Vec2& p) const {
  switch (kind) {
    case DomainKind::UnitSquare:
      return std::min(std::min(p.x, 1.0 - p.x), std::min(p.y, 1.0 - p.y));
    case DomainKind::UnitDisk:
      return 1.0 - p.norm();
  }
  return 0.0;
}

double Domain::area() const {
  return kind == DomainKind::UnitSquare ? 1.0 : M_PI;
}

Grid build_grid(const Domain& domain, double h) {
  if (!(h > 0.0) || h > 0.5)
    throw std::invalid_argument("build_grid: h must lie in (0, 1/2]");
  const double ninv = 1.0 / h;
  const int n = static_cast<int>(std::lround(ninv));
  if (n < 2 || std::abs(ninv - n) > 1e-9 * ninv)
    throw std::invalid_argument("build_grid: h must equal 1/n for integer n >= 2");

  Grid g;
  g.domain = domain;
  g.h = 1.0 / n;
  g.n = n;
  g.i0 = (domain.kind == DomainKind::UnitSquare) ? 0 : -n;
  g.nb = (domain.kind == DomainKind::UnitSquare) ? n + 1 : 2 * n + 1;

  const int count = g.box_count();
  g.interior_.assign(count, 0);
  g.bdist_.assign(count, 0.0);
  g.interior_index_.assign(count, -1);
  g.interior_ids_.clear();

  for (int j = g.i0; j < g.i0 + g.nb; ++j) {
    for (int i = g.i0; i < g.i0 + g.nb; ++i) {
      const int node = g.id(i, j);
      const Vec2 p = g.pos_ij(i, j);
      const double d = domain.signed_boundary_distance(p);
      g.bdist_[node] = std::max(d, 0.0);
      if (domain.inside(p)) {
        g.interior_[node] = 1;
        g.interior_index_[node] = static_cast<int>(g.interior_ids_.size());
        g.interior_ids_.push_back(node);
      }
    }
  }
  return g;
}

std::vector<uint8_t> inner_layer_mask(const Grid& grid, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("inner_layer_mask: delta must be >= 0");
  std::vector<uint8_t> mask(grid.box_count(), 0);
  for (int node : grid.interior_ids())
    if (grid.boundary_distance(node) > delta) mask[node] = 1;
  return mask;
}

void ScalarField::pin_exterior() {
  const auto& m = grid->interior_mask();
  for (size_t k = 0; k < v.size(); ++k)
    if (!m[k]) v[k] = 0.0;
}

void VectorField::pin_exterior() {
  const auto& m = grid->interior_mask();
  for (size_t k = 0; k < x.size(); ++k)
    if (!m[k]) x[k] = y[k] = 0.0;
}

void VectorField::clear() {
  std::fill(x.begin(), x.end(), 0.0);
  std::fill(y.begin(), y.end(), 0.0);
}

void check_same_grid(const Grid* a, const Grid* b) {
  if (a == nullptr || b == nullptr) throw std::invalid_argument("field has no grid");
  if (a == b) return;
  if (a->domain.kind != b->domain.kind || a->n != b->n)
    throw std::invalid_argument("fields live on different grids");
}

double dot(const ScalarField& f, const ScalarField& g) {
  check_same_grid(f.grid, g.grid);
  const Grid& gr = *f.grid;
  double s = 0.0;
  for (int node : gr.interior_ids()) s += f.v[node] * g.v[node];
  return gr.h * gr.h * s;
}

double dot(const VectorField& f, const VectorField& g) {
  check_same_grid(f.grid, g.grid);
  const Grid& gr = *f.grid;
  double s = 0.0;
  for (int node : gr.interior_ids())
    s += f.x[node] * g.x[node] + f.y[node] * g.y[node];
  return gr.h * gr.h * s;
}

double norm_l2(const ScalarField& f) { return std::sqrt(dot(f, f)); }
double norm_l2(const VectorField& f) { return std::sqrt(dot(f, f)); }

double norm_inf(const ScalarField& f) {
  double m = 0.0;
  for (int node : f.grid->interior_ids()) m = std::max(m, std::abs(f.v[node]));
  return m;
}

double integral(const ScalarField& f) {
  const Grid& gr = *f.grid;
  double s = 0.0;
  for (int node : gr.interior_ids()) s += f.v[node];
  return gr.h * gr.h * s;
}

double integral_abs(const ScalarField& f) {
  const Grid& gr = *f.grid;
  double s = 0.0;
  for (int node : gr.interior_ids()) s += std::abs(f.v[node]);
  return gr.h * gr.h * s;
}

}  // namespace eddy
