#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "eddylab/grid.hpp"
#include "eddylab/vec.hpp"

namespace eddy {

// Parameters of the vortex-patch noise family. Admissibility ties them
// together: centers on a 1/N lattice inside the depth-delta inner layer,
// blobs of radius r that fit between same-class centers (M/N apart) and
// inside the layer, mollification scale eps locked to 1/N.
struct VortexConfig {
  int N = 0;
  int M = 0;
  double delta = 0.0;
  double r = 0.0;
  double eps = 0.0;
  double Gamma = 0.0;
};

// Violated admissibility constraints, one human-readable line each.
// Empty means admissible. Violations are data, not exceptions.
std::vector<std::string> validate_config(const VortexConfig& cfg);

// Centers (k/N, h/N) strictly deeper than delta, partitioned into M^2
// classes by residues (k mod M, h mod M). Within one class neighboring
// centers are M/N apart, far enough that radius-r blobs cannot overlap.
struct Lattice {
  int N = 0;
  int M = 0;
  std::vector<Vec2> centers;
  std::vector<std::pair<int, int>> coords;  // integer (k, h) per center
  std::vector<std::pair<int, int>> klass;   // (k mod M, h mod M), in [0,M)^2

  int size() const { return static_cast<int>(centers.size()); }
};

// Enumerates the lattice over the grid's domain. Only N, M, delta are
// consulted, so geometry examples with otherwise inadmissible configs
// still work. Throws if no center survives the depth cut.
Lattice build_lattice(const Grid& grid, const VortexConfig& cfg);

// The single radial vortex profile w = grad-perp(psi), where psi is the
// truncated log stream function mollified at scale eps. Radial structure
// makes every evaluation a 1D lookup: w(x) = psi'(|x|) * (-sin, cos)theta.
//
// psi'(rho) is piecewise analytic:
//   [0, eps)             mollifier mass m(rho)/(2 pi rho), tabulated
//   [eps, 1/3 - eps]     exactly 1/(2 pi rho)  (mean-value property of log)
//   (1/3 - eps, 2/3+eps) 1/(2 pi rho) plus the tabulated cutoff correction
//   [2/3 + eps, inf)     exactly zero
class VortexProfile {
 public:
  double eps = 0.0;
  double support_radius = 0.0;  // 2/3 + eps
  double norm_w_sq = 0.0;       // integral of |w|^2 over the plane

  double psi(double rho) const;
  double dpsi(double rho) const;  // psi'(rho)
  Vec2 w(const Vec2& p) const;

  // Autocorrelation c(s) = integral of w(x) . w(x - s e) dx; radial, so any
  // unit e. c(0) = norm_w_sq (checked in tests via the independent route),
  // c(s) = 0 exactly for s >= 2 * support_radius. Gram entries of shifted
  // copies reduce to this kernel.
  double cw(double s) const;

  // Uniform tables with cubic interpolation; filled by build_profile.
  struct Table {
    double x0 = 0.0, dx = 0.0;
    std::vector<double> v;
    double operator()(double x) const;
    bool empty() const { return v.empty(); }
  };

  Table mass;       // mollifier mass within radius t*eps, t in [0,1]
  Table psi_head;   // psi on [0, eps], argument t = rho/eps
  Table psi_tail;   // cutoff correction to psi on [tail_lo, support_radius]
  Table dpsi_tail;  // its radial derivative
  Table cw_tab;     // autocorrelation on [0, 2*support_radius]
  double tail_lo = 0.0;
};

// Builds the profile tables. table_resolution is cells per unit radius and
// must resolve the mollification scale (>= 4 cells per eps). Requires
// eps < 1/6 so the exact-log band is nonempty.
VortexProfile build_profile(const VortexConfig& cfg, int table_resolution);

// The basis member for center z is u(x) = Gamma * (1/r) * w((x - z)/r),
// supported in the radius r*support_radius disk around z. Fields are held
// as dense patches over their support's bounding box (a full-grid field per
// center would not fit in memory at realistic N); field() materializes a
// grid-wide VectorField on demand.
class VortexBasis {
 public:
  struct Patch {
    int i0 = 0, j0 = 0;  // lowest node index covered, per axis
    int ni = 0, nj = 0;  // nodes covered per axis
    std::vector<double> ux, uy;  // row-major [nj][ni], zero off-support
  };

  const Grid* grid = nullptr;
  VortexConfig cfg;
  Lattice lattice;
  double norm_w_sq = 0.0;       // continuum integral, shared by all members
  double support_radius = 0.0;  // r * profile.support_radius
  bool core_resolved = false;   // h <= r*eps; when false, discrete norms of
                                // individual members are not trustworthy
  std::vector<Patch> patches;

  int size() const { return static_cast<int>(patches.size()); }
  VectorField field(int j) const;
  // out += coeff * u_j, touching only the patch. The hot path of noise
  // synthesis and Gram matvecs.
  void accumulate(int j, double coeff, VectorField& out) const;
  // Discrete L2 pairing <u_j, v> = h^2 * sum over the patch.
  double pair(int j, const VectorField& v) const;
  // u_j at a box node (zero outside the patch).
  Vec2 value(int j, int node) const;
  double patch_norm_sq(int j) const;      // h^2 * sum of |u_j|^2
  double pair_fields(int a, int b) const; // h^2 * sum over patch overlap

  // One row per covered node per center: cx, cy, k0, h0, i, j, ux, uy.
  void export_csv(std::ostream& os) const;
};

VortexBasis assemble_basis(const Grid& grid, const VortexConfig& cfg,
                           const VortexProfile& profile);

}  // namespace eddy
