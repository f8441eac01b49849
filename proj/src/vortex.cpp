#include "eddylab/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "eddylab/linalg.hpp"

namespace eddy {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInv2Pi = 1.0 / (2.0 * kPi);

// C-infinity glue: ramp(t) = exp(-1/t) on t > 0, identically 0 on t <= 0.
double ramp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double ramp_d(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = ramp(t), b = ramp(1.0 - t);
  return a / (a + b);
}

double smoothstep_d(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = ramp(t), b = ramp(1.0 - t);
  const double s = a + b;
  return (ramp_d(t) * b + a * ramp_d(1.0 - t)) / (s * s);
}

// Radial cutoff: 1 on [0, 1/3], 0 on [2/3, inf), smooth in between.
double cutoff(double rho) { return smoothstep((2.0 / 3.0 - rho) * 3.0); }
double cutoff_d(double rho) { return -3.0 * smoothstep_d((2.0 / 3.0 - rho) * 3.0); }

// Unnormalized mollifier density at radius s (unit scale).
double bump1(double s) {
  const double t = 1.0 - s * s;
  return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
}

// The stream function is log * cutoff; tau is its deviation from the pure
// log, supported on [1/3, inf) and equal to -log/(2 pi) beyond 2/3. The
// mollified stream function is exactly log/(2 pi) + tau * mollifier outside
// the mollification ball, which is what makes the middle band closed-form.
double tau(double d) { return kInv2Pi * std::log(d) * (cutoff(d) - 1.0); }
double tau_d(double d) {
  return kInv2Pi * (cutoff_d(d) * std::log(d) + (cutoff(d) - 1.0) / d);
}

template <class F>
std::vector<double> cumulative_integral(F&& f, double a, double b, int ncells) {
  const GaussRule g = gauss_legendre_rule(8);
  std::vector<double> cum(ncells + 1, 0.0);
  const double dx = (b - a) / ncells;
  for (int i = 0; i < ncells; ++i) {
    const double xm = a + (i + 0.5) * dx, xr = 0.5 * dx;
    double s = 0.0;
    for (size_t q = 0; q < g.x.size(); ++q) s += g.w[q] * f(xm + xr * g.x[q]);
    cum[i + 1] = cum[i] + xr * s;
  }
  return cum;
}

double simpson_over_nodes(const std::vector<double>& v, double dx) {
  // composite Simpson; the final interval falls back to trapezoid when the
  // node count is even
  const int n = static_cast<int>(v.size()) - 1;
  double s = 0.0;
  int i = 0;
  for (; i + 2 <= n; i += 2) s += dx / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
  if (i < n) s += 0.5 * dx * (v[i] + v[i + 1]);
  return s;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "; ";
    out += parts[i];
  }
  return out;
}

}  // namespace

double VortexProfile::Table::operator()(double xq) const {
  const int n = static_cast<int>(v.size());
  if (n == 0) return 0.0;
  if (n == 1 || dx <= 0.0) return v[0];
  const double u = (xq - x0) / dx;
  if (u <= 0.0) return v.front();
  if (u >= n - 1) return v.back();
  const int k = static_cast<int>(u);
  const double t = u - k;
  const double pm = v[k > 0 ? k - 1 : 0];
  const double p0 = v[k];
  const double p1 = v[k + 1];
  const double pp = v[k + 2 < n ? k + 2 : n - 1];
  // Catmull-Rom through the four surrounding nodes
  return p0 + 0.5 * t *
                  (p1 - pm +
                   t * (2.0 * pm - 5.0 * p0 + 4.0 * p1 - pp +
                        t * (3.0 * (p0 - p1) + pp - pm)));
}

double VortexProfile::psi(double rho) const {
  if (rho >= support_radius) return 0.0;
  if (rho < eps) return psi_head(rho / eps);
  if (rho < tail_lo) return kInv2Pi * std::log(rho);
  return kInv2Pi * std::log(rho) + psi_tail(rho);
}

double VortexProfile::dpsi(double rho) const {
  if (rho >= support_radius) return 0.0;
  if (rho < eps) {
    if (rho <= 0.0) return 0.0;
    return mass(rho / eps) * kInv2Pi / rho;
  }
  if (rho < tail_lo) return kInv2Pi / rho;
  return kInv2Pi / rho + dpsi_tail(rho);
}

Vec2 VortexProfile::w(const Vec2& p) const {
  const double rho = std::hypot(p.x, p.y);
  if (rho >= support_radius || rho < 1e-300) return {0.0, 0.0};
  const double s = dpsi(rho) / rho;
  return {-p.y * s, p.x * s};
}

double VortexProfile::cw(double s) const {
  if (s >= 2.0 * support_radius) return 0.0;
  return cw_tab(s);
}

VortexProfile build_profile(const VortexConfig& cfg, int table_resolution) {
  const double eps = cfg.eps;
  if (!(eps > 0.0 && eps < 1.0 / 6.0))
    throw std::invalid_argument("vortex profile needs eps in (0, 1/6)");
  if (table_resolution < 4 || table_resolution * eps < 4.0)
    throw std::invalid_argument(
        "table_resolution too coarse: need at least 4 cells per eps");

  VortexProfile P;
  P.eps = eps;
  P.support_radius = 2.0 / 3.0 + eps;
  P.tail_lo = std::max(eps, 1.0 / 3.0 - 2.0 * eps);

  // Mollifier mass within radius t*eps, t in [0,1]. Normalizing by the full
  // integral makes mass(1) = 1 exactly, so the derivative branch is
  // continuous at eps by construction.
  const int nm = 2048;
  const auto raw =
      cumulative_integral([](double s) { return bump1(s) * s; }, 0.0, 1.0, nm);
  const double c_norm = 1.0 / (2.0 * kPi * raw[nm]);
  P.mass.x0 = 0.0;
  P.mass.dx = 1.0 / nm;
  P.mass.v.resize(nm + 1);
  for (int i = 0; i <= nm; ++i) P.mass.v[i] = raw[i] / raw[nm];

  // Stream function inside the mollification ball, integrated inward from
  // the matching value log(eps)/(2 pi) at the edge.
  const auto& mass = P.mass;
  const auto H = cumulative_integral(
      [&mass](double t) { return t > 0.0 ? mass(t) / t : 0.0; }, 0.0, 1.0, nm);
  P.psi_head.x0 = 0.0;
  P.psi_head.dx = 1.0 / nm;
  P.psi_head.v.resize(nm + 1);
  for (int i = 0; i <= nm; ++i)
    P.psi_head.v[i] = kInv2Pi * std::log(eps) - kInv2Pi * (H[nm] - H[i]);

  // Cutoff correction beyond the pure-log band: the 2D convolution of tau
  // with the mollifier, reduced to radius x angle quadrature. Integrands are
  // even in the angle, so the half period is integrated and doubled.
  {
    const double lo = P.tail_lo, hi = P.support_radius;
    int nt = std::max(32, static_cast<int>(std::ceil((hi - lo) * table_resolution)));
    if (nt % 2) ++nt;
    const double dxt = (hi - lo) / nt;
    P.psi_tail.x0 = P.dpsi_tail.x0 = lo;
    P.psi_tail.dx = P.dpsi_tail.dx = dxt;
    P.psi_tail.v.assign(nt + 1, 0.0);
    P.dpsi_tail.v.assign(nt + 1, 0.0);

    const GaussRule gt = gauss_legendre_rule(24);
    const int nphi = 128;
    std::vector<double> cphi(nphi + 1), wphi(nphi + 1);
    for (int j = 0; j <= nphi; ++j) {
      cphi[j] = std::cos(kPi * j / nphi);
      wphi[j] = (j == 0 || j == nphi ? 0.5 : 1.0) * (kPi / nphi) * 2.0;
    }
    for (int i = 0; i <= nt; ++i) {
      const double rho = lo + i * dxt;
      double ps = 0.0, ds = 0.0;
      for (size_t q = 0; q < gt.x.size(); ++q) {
        const double t = 0.5 + 0.5 * gt.x[q];
        const double wq = 0.5 * gt.w[q] * bump1(t) * t;
        const double s = eps * t;
        double pin = 0.0, din = 0.0;
        for (int j = 0; j <= nphi; ++j) {
          const double d2 = rho * rho + s * s - 2.0 * rho * s * cphi[j];
          const double d = std::sqrt(d2);
          if (d <= 1.0 / 3.0) continue;  // tau vanishes there
          pin += wphi[j] * tau(d);
          din += wphi[j] * tau_d(d) * (rho - s * cphi[j]) / d;
        }
        ps += wq * pin;
        ds += wq * din;
      }
      P.psi_tail.v[i] = c_norm * ps;
      P.dpsi_tail.v[i] = c_norm * ds;
    }
  }

  // |w|^2 integral, piecewise: mollified head, closed-form log band, then
  // Simpson over the tail table.
  {
    const int n = static_cast<int>(P.mass.v.size()) - 1;
    std::vector<double> hv(n + 1, 0.0);
    for (int i = 1; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      hv[i] = P.mass.v[i] * P.mass.v[i] / t;
    }
    const double head = kInv2Pi * simpson_over_nodes(hv, 1.0 / n);
    const double band =
        P.tail_lo > eps ? kInv2Pi * std::log(P.tail_lo / eps) : 0.0;
    const int ntail = static_cast<int>(P.psi_tail.v.size()) - 1;
    std::vector<double> tv(ntail + 1);
    for (int i = 0; i <= ntail; ++i) {
      const double rho = P.tail_lo + i * P.psi_tail.dx;
      const double d = kInv2Pi / rho + P.dpsi_tail.v[i];
      tv[i] = 2.0 * kPi * d * d * rho;
    }
    const double tail = simpson_over_nodes(tv, P.psi_tail.dx);
    P.norm_w_sq = head + band + tail;
  }

  // Autocorrelation table. Polar quadrature around one core; the radial
  // measure rho*drho tames the 1/rho of the profile, and the inner factor
  // is bounded because |rho - s cos(phi)| <= |x - s e|.
  {
    const double span = 2.0 * P.support_radius;
    int ncw = static_cast<int>(std::ceil(span * table_resolution));
    ncw = std::max(512, std::min(1536, ncw));
    P.cw_tab.x0 = 0.0;
    P.cw_tab.dx = span / ncw;
    P.cw_tab.v.assign(ncw + 1, 0.0);

    const GaussRule g16 = gauss_legendre_rule(16);
    std::vector<double> rnode, rweight;  // weight includes rho * dpsi(rho)
    auto add_panel = [&](double a, double b) {
      for (size_t q = 0; q < g16.x.size(); ++q) {
        const double rho = 0.5 * (a + b) + 0.5 * (b - a) * g16.x[q];
        rnode.push_back(rho);
        rweight.push_back(0.5 * (b - a) * g16.w[q] * rho * P.dpsi(rho));
      }
    };
    add_panel(0.0, eps);
    const int npanel = 20;
    for (int p = 0; p < npanel; ++p)
      add_panel(eps + (P.support_radius - eps) * p / npanel,
                eps + (P.support_radius - eps) * (p + 1) / npanel);

    const int nphi = 128;
    std::vector<double> cphi(nphi + 1), wphi(nphi + 1);
    for (int j = 0; j <= nphi; ++j) {
      cphi[j] = std::cos(kPi * j / nphi);
      wphi[j] = (j == 0 || j == nphi ? 0.5 : 1.0) * (kPi / nphi) * 2.0;
    }
    for (int i = 0; i <= ncw; ++i) {
      const double s = i * P.cw_tab.dx;
      double acc = 0.0;
      for (size_t q = 0; q < rnode.size(); ++q) {
        const double rho = rnode[q];
        double inner = 0.0;
        for (int j = 0; j <= nphi; ++j) {
          const double d2 = rho * rho + s * s - 2.0 * rho * s * cphi[j];
          if (d2 >= P.support_radius * P.support_radius) continue;
          const double d = std::sqrt(d2);
          if (d < 1e-14) continue;
          inner += wphi[j] * P.dpsi(d) * (rho - s * cphi[j]) / d;
        }
        acc += rweight[q] * inner;
      }
      P.cw_tab.v[i] = acc;
    }
  }

  return P;
}

std::vector<std::string> validate_config(const VortexConfig& cfg) {
  std::vector<std::string> bad;
  std::ostringstream os;
  os << std::setprecision(12);
  auto flush = [&] {
    bad.push_back(os.str());
    os.str("");
  };

  if (cfg.N < 1) {
    os << "N must be a positive integer, got " << cfg.N;
    flush();
    return bad;  // remaining constraints divide by N
  }
  if (cfg.M < 1) {
    os << "M must be a positive integer, got " << cfg.M;
    flush();
    return bad;
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 0.5)) {
    os << "delta must lie in (0, 1/2), got " << cfg.delta;
    flush();
  }
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0 / 6.0)) {
    os << "eps must lie in (0, 1/6), got " << cfg.eps;
    flush();
  }
  if (!(cfg.r > 0.0)) {
    os << "r must be positive, got " << cfg.r;
    flush();
  }
  if (cfg.Gamma < 0.0) {
    os << "Gamma must be nonnegative, got " << cfg.Gamma;
    flush();
  }
  if (1.0 / cfg.N > cfg.delta) {
    os << "1/N <= delta violated: 1/N = " << 1.0 / cfg.N << " exceeds delta = "
       << cfg.delta;
    flush();
  }
  if (cfg.r < 12.0 / cfg.N) {
    os << "r >= 12/N violated: r = " << cfg.r << " below " << 12.0 / cfg.N;
    flush();
  }
  if (cfg.r > cfg.M / (2.0 * cfg.N)) {
    os << "r <= M/(2N) violated: r = " << cfg.r << " exceeds "
       << cfg.M / (2.0 * cfg.N);
    flush();
  }
  if (cfg.r > cfg.delta) {
    os << "r <= delta violated: r = " << cfg.r << " exceeds delta = "
       << cfg.delta;
    flush();
  }
  if (cfg.M <= 24) {
    os << "M > 24 violated: M = " << cfg.M;
    flush();
  }
  if (std::abs(cfg.eps - 1.0 / cfg.N) > 1e-12) {
    os << "eps = 1/N violated: eps = " << cfg.eps << ", 1/N = " << 1.0 / cfg.N;
    flush();
  }
  return bad;
}

Lattice build_lattice(const Grid& grid, const VortexConfig& cfg) {
  if (cfg.N < 1) throw std::invalid_argument("lattice needs N >= 1");
  if (cfg.M < 1) throw std::invalid_argument("lattice needs M >= 1");
  Lattice L;
  L.N = cfg.N;
  L.M = cfg.M;
  const Domain& dom = grid.domain;
  const int lo = dom.kind == DomainKind::UnitSquare ? 0 : -cfg.N;
  const int hi = cfg.N;
  for (int h = lo; h <= hi; ++h) {
    for (int k = lo; k <= hi; ++k) {
      const Vec2 p{static_cast<double>(k) / cfg.N,
                   static_cast<double>(h) / cfg.N};
      if (dom.signed_boundary_distance(p) > cfg.delta) {
        L.centers.push_back(p);
        L.coords.emplace_back(k, h);
        L.klass.emplace_back(((k % cfg.M) + cfg.M) % cfg.M,
                             ((h % cfg.M) + cfg.M) % cfg.M);
      }
    }
  }
  if (L.centers.empty()) {
    std::ostringstream os;
    os << "vortex lattice is empty: no point of the 1/" << cfg.N
       << " grid lies deeper than delta = " << cfg.delta;
    throw std::runtime_error(os.str());
  }
  return L;
}

VectorField VortexBasis::field(int j) const {
  VectorField F(*grid);
  accumulate(j, 1.0, F);
  return F;
}

void VortexBasis::accumulate(int j, double coeff, VectorField& out) const {
  const Patch& p = patches[j];
  const int nb = grid->nb, g0 = grid->i0;
  for (int jj = 0; jj < p.nj; ++jj) {
    const int base = (p.j0 + jj - g0) * nb + (p.i0 - g0);
    const double* sx = &p.ux[static_cast<size_t>(jj) * p.ni];
    const double* sy = &p.uy[static_cast<size_t>(jj) * p.ni];
    double* dx = &out.x[base];
    double* dy = &out.y[base];
    for (int ii = 0; ii < p.ni; ++ii) {
      dx[ii] += coeff * sx[ii];
      dy[ii] += coeff * sy[ii];
    }
  }
}

double VortexBasis::pair(int j, const VectorField& v) const {
  const Patch& p = patches[j];
  const int nb = grid->nb, g0 = grid->i0;
  double acc = 0.0;
  for (int jj = 0; jj < p.nj; ++jj) {
    const int base = (p.j0 + jj - g0) * nb + (p.i0 - g0);
    const double* sx = &p.ux[static_cast<size_t>(jj) * p.ni];
    const double* sy = &p.uy[static_cast<size_t>(jj) * p.ni];
    const double* vx = &v.x[base];
    const double* vy = &v.y[base];
    for (int ii = 0; ii < p.ni; ++ii) acc += sx[ii] * vx[ii] + sy[ii] * vy[ii];
  }
  return acc * grid->h * grid->h;
}

Vec2 VortexBasis::value(int j, int node) const {
  const Patch& p = patches[j];
  const int nb = grid->nb, g0 = grid->i0;
  const int i = node % nb + g0;
  const int jj = node / nb + g0;
  if (i < p.i0 || i >= p.i0 + p.ni || jj < p.j0 || jj >= p.j0 + p.nj)
    return {0.0, 0.0};
  const size_t idx = static_cast<size_t>(jj - p.j0) * p.ni + (i - p.i0);
  return {p.ux[idx], p.uy[idx]};
}

double VortexBasis::patch_norm_sq(int j) const {
  const Patch& p = patches[j];
  double acc = 0.0;
  for (size_t k = 0; k < p.ux.size(); ++k)
    acc += p.ux[k] * p.ux[k] + p.uy[k] * p.uy[k];
  return acc * grid->h * grid->h;
}

double VortexBasis::pair_fields(int a, int b) const {
  const Patch& pa = patches[a];
  const Patch& pb = patches[b];
  const int i0 = std::max(pa.i0, pb.i0);
  const int i1 = std::min(pa.i0 + pa.ni, pb.i0 + pb.ni);
  const int j0 = std::max(pa.j0, pb.j0);
  const int j1 = std::min(pa.j0 + pa.nj, pb.j0 + pb.nj);
  if (i0 >= i1 || j0 >= j1) return 0.0;
  double acc = 0.0;
  for (int jj = j0; jj < j1; ++jj) {
    const double* ax = &pa.ux[static_cast<size_t>(jj - pa.j0) * pa.ni + (i0 - pa.i0)];
    const double* ay = &pa.uy[static_cast<size_t>(jj - pa.j0) * pa.ni + (i0 - pa.i0)];
    const double* bx = &pb.ux[static_cast<size_t>(jj - pb.j0) * pb.ni + (i0 - pb.i0)];
    const double* by = &pb.uy[static_cast<size_t>(jj - pb.j0) * pb.ni + (i0 - pb.i0)];
    for (int ii = 0; ii < i1 - i0; ++ii) acc += ax[ii] * bx[ii] + ay[ii] * by[ii];
  }
  return acc * grid->h * grid->h;
}

void VortexBasis::export_csv(std::ostream& os) const {
  os << "cx,cy,k0,h0,i,j,ux,uy\n";
  os << std::setprecision(17);
  for (int f = 0; f < size(); ++f) {
    const Patch& p = patches[f];
    const Vec2 z = lattice.centers[f];
    const auto cls = lattice.klass[f];
    for (int jj = 0; jj < p.nj; ++jj) {
      for (int ii = 0; ii < p.ni; ++ii) {
        const size_t idx = static_cast<size_t>(jj) * p.ni + ii;
        if (p.ux[idx] == 0.0 && p.uy[idx] == 0.0) continue;
        os << z.x << ',' << z.y << ',' << cls.first << ',' << cls.second << ','
           << p.i0 + ii << ',' << p.j0 + jj << ',' << p.ux[idx] << ','
           << p.uy[idx] << '\n';
      }
    }
  }
}

VortexBasis assemble_basis(const Grid& grid, const VortexConfig& cfg,
                           const VortexProfile& profile) {
  const auto bad = validate_config(cfg);
  if (!bad.empty())
    throw std::invalid_argument("inadmissible vortex config: " + join(bad));
  if (std::abs(profile.eps - cfg.eps) > 1e-12)
    throw std::invalid_argument("profile was built for a different eps");

  VortexBasis B;
  B.grid = &grid;
  B.cfg = cfg;
  B.lattice = build_lattice(grid, cfg);
  B.norm_w_sq = profile.norm_w_sq;
  B.support_radius = cfg.r * profile.support_radius;
  B.core_resolved = grid.h <= cfg.r * cfg.eps + 1e-15;

  const double h = grid.h, R = B.support_radius, scale = cfg.Gamma / cfg.r;
  const int gmin = grid.i0, gmax = grid.i0 + grid.nb - 1;
  B.patches.resize(B.lattice.size());
  for (int f = 0; f < B.lattice.size(); ++f) {
    const Vec2 z = B.lattice.centers[f];
    VortexBasis::Patch& p = B.patches[f];
    p.i0 = std::max(gmin, static_cast<int>(std::ceil((z.x - R) / h - 1e-9)));
    p.j0 = std::max(gmin, static_cast<int>(std::ceil((z.y - R) / h - 1e-9)));
    const int i1 = std::min(gmax, static_cast<int>(std::floor((z.x + R) / h + 1e-9)));
    const int j1 = std::min(gmax, static_cast<int>(std::floor((z.y + R) / h + 1e-9)));
    p.ni = std::max(0, i1 - p.i0 + 1);
    p.nj = std::max(0, j1 - p.j0 + 1);
    p.ux.assign(static_cast<size_t>(p.ni) * p.nj, 0.0);
    p.uy.assign(static_cast<size_t>(p.ni) * p.nj, 0.0);
    for (int jj = 0; jj < p.nj; ++jj) {
      for (int ii = 0; ii < p.ni; ++ii) {
        if (!grid.interior_ij(p.i0 + ii, p.j0 + jj)) continue;
        const Vec2 x = grid.pos_ij(p.i0 + ii, p.j0 + jj);
        const Vec2 u = profile.w({(x.x - z.x) / cfg.r, (x.y - z.y) / cfg.r});
        const size_t idx = static_cast<size_t>(jj) * p.ni + ii;
        p.ux[idx] = scale * u.x;
        p.uy[idx] = scale * u.y;
      }
    }
  }
  return B;
}

}  // namespace eddy
