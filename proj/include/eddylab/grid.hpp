#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "eddylab/vec.hpp"

namespace eddy {

enum class DomainKind { UnitSquare, UnitDisk };

// The two supported domains: the open unit square (0,1)^2 and the open unit
// disk centered at the origin. Both expose the exact distance to the boundary.
struct Domain {
  DomainKind kind = DomainKind::UnitSquare;
  int dimension = 2;

  static Domain square() { return {DomainKind::UnitSquare, 2}; }
  static Domain disk() { return {DomainKind::UnitDisk, 2}; }

  bool inside(const Vec2& p) const;
  // Exact distance to the boundary; negative outside the closure.
  double signed_boundary_distance(const Vec2& p) const;
  double area() const;
};

// Uniform Cartesian grid of spacing h over the domain's bounding box.
// Nodes sit at integer multiples of h. A node is interior iff it lies
// strictly inside the domain; fields carry the value 0 on every non-interior
// node, which is how the homogeneous Dirichlet condition enters all stencils.
class Grid {
 public:
  Domain domain;
  double h = 0.0;
  int n = 0;   // 1/h
  int i0 = 0;  // lowest node index per axis (0 square, -n disk)
  int nb = 0;  // nodes per axis in the bounding box

  int box_count() const { return nb * nb; }
  int interior_count() const { return static_cast<int>(interior_ids_.size()); }

  int id(int i, int j) const { return (j - i0) * nb + (i - i0); }
  bool in_box(int i, int j) const { return i >= i0 && j >= i0 && i < i0 + nb && j < i0 + nb; }
  Vec2 pos_ij(int i, int j) const { return {i * h, j * h}; }
  Vec2 pos(int node) const {
    const int jj = node / nb, ii = node % nb;
    return {(ii + i0) * h, (jj + i0) * h};
  }

  bool interior(int node) const { return interior_[node] != 0; }
  bool interior_ij(int i, int j) const { return in_box(i, j) && interior_[id(i, j)] != 0; }
  double boundary_distance(int node) const { return bdist_[node]; }

  const std::vector<uint8_t>& interior_mask() const { return interior_; }
  const std::vector<double>& boundary_distances() const { return bdist_; }
  // Interior nodes in row-major order; fixes the unknown ordering of all
  // assembled operators.
  const std::vector<int>& interior_ids() const { return interior_ids_; }
  // -1 for non-interior nodes.
  int interior_index(int node) const { return interior_index_[node]; }

  friend Grid build_grid(const Domain& domain, double h);

 private:
  std::vector<uint8_t> interior_;
  std::vector<double> bdist_;
  std::vector<int> interior_ids_;
  std::vector<int> interior_index_;
};

// Builds the masked grid. h must be 1/n for an integer n >= 2 (tolerance
// 1e-9 on 1/h); resolutions coarser than h = 1/2 are rejected as unusable.
Grid build_grid(const Domain& domain, double h);

// Mask of the inner layer D_delta = {x in D : dist(x, boundary) > delta},
// one flag per bounding-box node. Non-interior nodes are never flagged.
std::vector<uint8_t> inner_layer_mask(const Grid& grid, double delta);

struct ScalarField {
  const Grid* grid = nullptr;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid(&g), v(g.box_count(), 0.0) {}
  double& operator[](int node) { return v[node]; }
  double operator[](int node) const { return v[node]; }
  // Re-pins every non-interior node to zero (the Dirichlet invariant).
  void pin_exterior();
};

struct VectorField {
  const Grid* grid = nullptr;
  std::vector<double> x, y;

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : grid(&g), x(g.box_count(), 0.0), y(g.box_count(), 0.0) {}
  Vec2 at(int node) const { return {x[node], y[node]}; }
  void set(int node, const Vec2& u) {
    x[node] = u.x;
    y[node] = u.y;
  }
  void pin_exterior();
  void clear();
};

// Discrete L2 pairing h^2 * sum over interior nodes. Both fields must live
// on the same grid.
double dot(const ScalarField& f, const ScalarField& g);
double dot(const VectorField& f, const VectorField& g);
double norm_l2(const ScalarField& f);
double norm_l2(const VectorField& f);
double norm_inf(const ScalarField& f);
// h^2 * sum over interior nodes of f (pairing against the constant 1).
double integral(const ScalarField& f);
// h^2 * sum over interior nodes of |f|.
double integral_abs(const ScalarField& f);

void check_same_grid(const Grid* a, const Grid* b);

}  // namespace eddy
