#include "eddylab/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

using namespace eddy;

namespace {

const double PI = 3.141592653589793238462643383279502884;

bool mentions(const std::vector<std::string>& violations, const char* frag) {
  for (const auto& v : violations)
    if (v.find(frag) != std::string::npos) return true;
  return false;
}

// Independent reference for the mollified point-vortex kernel
//   w(x) = (1/2pi) * integral of f_eps(y) (x-y)^perp / |x-y|^2 dy,
// evaluated in polar coordinates around x, where the polar Jacobian cancels
// the 1/|x-y| weight and leaves a bounded smooth integrand. Uses its own
// mollifier normalization (Simpson) and midpoint quadrature, sharing nothing
// with the profile construction.
double test_bump(double s) {
  const double t = 1.0 - s * s;
  return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
}

double test_bump_norm() {
  const int n = 1 << 16;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    const double v = test_bump(s) * s;
    acc += (i == 0 || i == n) ? v : ((i % 2) ? 4.0 * v : 2.0 * v);
  }
  return 2.0 * PI * acc / (3.0 * n);
}

Vec2 oracle_kernel(const Vec2& x, double eps) {
  static const double c = 1.0 / test_bump_norm();
  const double ax = std::hypot(x.x, x.y);
  const double thx = std::atan2(x.y, x.x);
  const double alpha = ax > eps ? std::asin(eps / ax) : PI;
  const int nth = 512, nr = 512;
  const double rlo = std::max(0.0, ax - eps), rhi = ax + eps;
  double wx = 0.0, wy = 0.0;
  for (int i = 0; i < nth; ++i) {
    const double th = thx - alpha + (2.0 * alpha) * (i + 0.5) / nth;
    const double ux = std::cos(th), uy = std::sin(th);
    double inner = 0.0;
    for (int j = 0; j < nr; ++j) {
      const double rho = rlo + (rhi - rlo) * (j + 0.5) / nr;
      inner += test_bump(std::hypot(x.x - rho * ux, x.y - rho * uy) / eps);
    }
    inner *= (rhi - rlo) / nr * c / (eps * eps);
    wx += -uy * inner;
    wy += ux * inner;
  }
  const double scale = (2.0 * alpha / nth) / (2.0 * PI);
  return {wx * scale, wy * scale};
}

VortexConfig sweep_config() {
  VortexConfig cfg;
  cfg.N = 200;
  cfg.M = 30;
  cfg.delta = 0.1;
  cfg.r = 0.07;
  cfg.eps = 1.0 / 200;
  cfg.Gamma = 0.01;
  return cfg;
}

// Smallest N whose admissibility window is nonempty on the unit square:
// r must reach 12/N yet stay below delta < 1/2, which forces r = 0.4 here.
// The payoff is a mollification core r*eps = 1/75 that desk grids resolve.
VortexConfig resolved_config() {
  VortexConfig cfg;
  cfg.N = 30;
  cfg.M = 30;
  cfg.delta = 0.45;
  cfg.r = 0.4;
  cfg.eps = 1.0 / 30;
  cfg.Gamma = 0.7;
  return cfg;
}

}  // namespace

TEST_CASE("config validation follows the admissibility arithmetic") {
  VortexConfig ok = sweep_config();
  CHECK(validate_config(ok).empty());

  VortexConfig tight = ok;  // 12/N = 0.06 <= 0.07 <= min(M/2N, delta) = 0.075
  tight.r = 0.075;
  CHECK(validate_config(tight).empty());

  VortexConfig small_r;  // r = 0.11 < 12/100 = 0.12
  small_r.N = 100;
  small_r.M = 25;
  small_r.delta = 0.1;
  small_r.r = 0.11;
  small_r.eps = 1.0 / 100;
  small_r.Gamma = 0.01;
  const auto v1 = validate_config(small_r);
  CHECK(!v1.empty());
  CHECK(mentions(v1, "r >= 12/N"));

  VortexConfig small_m = ok;
  small_m.M = 20;
  const auto v2 = validate_config(small_m);
  CHECK(!v2.empty());
  CHECK(mentions(v2, "M > 24"));
  CHECK(mentions(v2, "r <= M/(2N)"));  // 0.07 > 20/400

  VortexConfig coarse = ok;
  coarse.N = 8;  // 1/N = 0.125 > delta, and eps no longer equals 1/N
  const auto v3 = validate_config(coarse);
  CHECK(mentions(v3, "1/N <= delta"));
  CHECK(mentions(v3, "eps = 1/N"));

  VortexConfig zero_gamma = ok;  // degenerate but legal: all fields vanish
  zero_gamma.Gamma = 0.0;
  CHECK(validate_config(zero_gamma).empty());
}

TEST_CASE("lattice enumeration, class residues, and emptiness") {
  const Grid g = build_grid(Domain::square(), 0.25);

  SUBCASE("delta=0.3, N=5 leaves the four centers at coordinates 2/5, 3/5") {
    VortexConfig cfg;
    cfg.N = 5;
    cfg.M = 3;
    cfg.delta = 0.3;
    const Lattice L = build_lattice(g, cfg);
    REQUIRE(L.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK((L.centers[i].x == 0.4 || L.centers[i].x == 0.6));
      CHECK((L.centers[i].y == 0.4 || L.centers[i].y == 0.6));
    }
    double mind = 1e300;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        mind = std::min(mind, std::hypot(L.centers[a].x - L.centers[b].x,
                                         L.centers[a].y - L.centers[b].y));
    CHECK(mind == doctest::Approx(1.0 / 5).epsilon(1e-14));
  }

  SUBCASE("same-class centers are exactly M/N apart at their closest") {
    VortexConfig cfg;
    cfg.N = 20;
    cfg.M = 4;
    cfg.delta = 0.2;
    const Lattice L = build_lattice(g, cfg);
    CHECK(L.size() == 11 * 11);  // k/20 in (0.2, 0.8) means k in 5..15
    double mind = 1e300, mind_all = 1e300;
    for (int a = 0; a < L.size(); ++a)
      for (int b = a + 1; b < L.size(); ++b) {
        const double d = std::hypot(L.centers[a].x - L.centers[b].x,
                                    L.centers[a].y - L.centers[b].y);
        mind_all = std::min(mind_all, d);
        if (L.klass[a] == L.klass[b]) mind = std::min(mind, d);
      }
    CHECK(mind == doctest::Approx(4.0 / 20).epsilon(1e-14));
    CHECK(mind_all == doctest::Approx(1.0 / 20).epsilon(1e-14));
  }

  SUBCASE("class residues are nonnegative also for disk coordinates") {
    const Grid gd = build_grid(Domain::disk(), 0.25);
    VortexConfig cfg;
    cfg.N = 7;
    cfg.M = 3;
    cfg.delta = 0.2;
    const Lattice L = build_lattice(gd, cfg);
    CHECK(L.size() > 0);
    bool saw_negative_coord = false;
    for (int i = 0; i < L.size(); ++i) {
      const auto [k, h] = L.coords[i];
      if (k < 0 || h < 0) saw_negative_coord = true;
      CHECK(L.klass[i].first == ((k % 3) + 3) % 3);
      CHECK(L.klass[i].second == ((h % 3) + 3) % 3);
      CHECK(L.klass[i].first >= 0);
      CHECK(L.klass[i].second >= 0);
      CHECK(gd.domain.signed_boundary_distance(L.centers[i]) > cfg.delta);
    }
    CHECK(saw_negative_coord);
  }

  SUBCASE("a layer deeper than half the square rejects every center") {
    VortexConfig cfg;
    cfg.N = 5;
    cfg.M = 3;
    cfg.delta = 0.51;
    CHECK_THROWS_AS(build_lattice(g, cfg), std::runtime_error);
  }
}

TEST_CASE("profile reproduces the mollified log stream function") {
  VortexConfig cfg;
  cfg.eps = 1e-3;
  const VortexProfile P = build_profile(cfg, 4096);

  SUBCASE("polar branches") {
    CHECK(P.mass(1.0) == 1.0);  // mollifier is a probability density
    // pure-kernel band: psi' = 1/(2 pi rho) exactly
    for (double rho : {2e-3, 0.05, 0.125, 0.3})
      CHECK(P.dpsi(rho) == doctest::Approx(1.0 / (2.0 * PI * rho)).epsilon(1e-14));
    CHECK(P.psi(0.125) == doctest::Approx(std::log(0.125) / (2.0 * PI)).epsilon(1e-14));
    // support ends at 2/3 + eps, exactly
    const Vec2 far = P.w({0.7, 0.1});
    CHECK(far.x == 0.0);
    CHECK(far.y == 0.0);
    CHECK(P.psi(P.support_radius) == 0.0);
    CHECK(P.dpsi(0.9) == 0.0);
  }

  SUBCASE("near-kernel magnitude at |x| = 1/8") {
    const Vec2 w = P.w({0.125, 0.0});
    const double mag = std::hypot(w.x, w.y);
    CHECK(mag == doctest::Approx(4.0 / PI).epsilon(0.01));
    // against the independent convolution quadrature
    const Vec2 o = oracle_kernel({0.125, 0.0}, cfg.eps);
    CHECK(std::hypot(w.x - o.x, w.y - o.y) <= 1e-6 * std::hypot(o.x, o.y));
  }

  SUBCASE("w equals the mollified kernel inside the core too") {
    for (double ax : {cfg.eps * 0.5, cfg.eps, 3.0 * cfg.eps}) {
      const Vec2 x{ax * 0.6, ax * 0.8};
      const Vec2 w = P.w(x);
      const Vec2 o = oracle_kernel(x, cfg.eps);
      CHECK(std::hypot(w.x - o.x, w.y - o.y) <= 1e-5 * std::hypot(o.x, o.y));
    }
  }

  SUBCASE("branch joins are continuous") {
    const VortexConfig c2{0, 0, 0.0, 0.0, 1.0 / 50, 0.0};
    const VortexProfile Q = build_profile(c2, 512);
    for (double rho : {Q.eps, Q.tail_lo, Q.support_radius * 0.999}) {
      const double lo = rho * (1.0 - 1e-9), hi = rho * (1.0 + 1e-9);
      CHECK(std::fabs(Q.psi(hi) - Q.psi(lo)) < 1e-7);
      CHECK(std::fabs(Q.dpsi(hi) - Q.dpsi(lo)) < 1e-6 * std::fabs(Q.dpsi(hi)) + 1e-9);
    }
  }

  SUBCASE("resolution gate") {
    VortexConfig bad = cfg;  // 4096 cells cannot resolve eps = 1e-4
    bad.eps = 1e-4;
    CHECK_THROWS_AS(build_profile(bad, 4096), std::invalid_argument);
    bad.eps = 0.2;  // exact-log band would be empty
    CHECK_THROWS_AS(build_profile(bad, 4096), std::invalid_argument);
  }
}

TEST_CASE("norm of w grows like the log of the mollification scale") {
  // norm_w_sq(eps) should fit a + b*log(1/eps) with b near the band density
  // 1/(2 pi); that is the sharp version of the <= C log(1/eps) bound.
  const double es[3] = {1.0 / 50, 1.0 / 100, 1.0 / 200};
  double n[3];
  for (int i = 0; i < 3; ++i) {
    VortexConfig cfg;
    cfg.eps = es[i];
    n[i] = build_profile(cfg, 1024).norm_w_sq;
  }
  CHECK(n[0] < n[1]);
  CHECK(n[1] < n[2]);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    const double x = std::log(1.0 / es[i]);
    sx += x;
    sy += n[i];
    sxx += x * x;
    sxy += x * n[i];
  }
  const double b = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  const double a = (sy - b * sx) / 3;
  CHECK(b == doctest::Approx(1.0 / (2.0 * PI)).epsilon(0.02));
  for (int i = 0; i < 3; ++i) {
    const double fit = a + b * std::log(1.0 / es[i]);
    CHECK(n[i] == doctest::Approx(fit).epsilon(1e-3));  // log-linear residual
  }
  // the bound itself, with the fitted constant
  const double C = *std::max_element(n, n + 3) / std::log(1.0 / es[0]);
  for (int i = 0; i < 3; ++i) CHECK(n[i] <= C * std::log(1.0 / es[i]) + 1e-12);
}

TEST_CASE("autocorrelation kernel matches the fields it encodes") {
  VortexConfig cfg;
  cfg.eps = 0.02;
  const VortexProfile P = build_profile(cfg, 512);

  // same integral, two routes: piecewise-analytic norm vs generic quadrature
  CHECK(P.cw(0.0) == doctest::Approx(P.norm_w_sq).epsilon(1e-5));

  // beyond twice the support radius the branch is exact zero
  CHECK(P.cw(2.0 * P.support_radius) == 0.0);
  CHECK(P.cw(1.9) == 0.0);

  // brute-force midpoint integral of w(x).w(x - s e) at one separation
  const double s = 0.3;
  const int nn = 2048;
  const double lo = -0.75, hi = 0.75 + s, hh = (hi - lo) / nn;
  double acc = 0.0;
  for (int j = 0; j < nn; ++j) {
    const double y = lo + (j + 0.5) * hh;
    if (std::fabs(y) > P.support_radius) continue;
    for (int i = 0; i < nn; ++i) {
      const double x = lo + (i + 0.5) * hh;
      const Vec2 a = P.w({x, y});
      if (a.x == 0.0 && a.y == 0.0) continue;
      const Vec2 b = P.w({x - s, y});
      acc += a.x * b.x + a.y * b.y;
    }
  }
  acc *= hh * hh;
  CHECK(P.cw(s) == doctest::Approx(acc).epsilon(1e-4));
}

TEST_CASE("sampled basis matches the continuum profile when the core is resolved") {
  const VortexConfig cfg = resolved_config();
  REQUIRE(validate_config(cfg).empty());
  const VortexProfile P = build_profile(cfg, 512);
  const Grid g = build_grid(Domain::square(), 1.0 / 128);
  const VortexBasis B = assemble_basis(g, cfg, P);

  CHECK(B.core_resolved);  // h = 1/128 <= r*eps = 1/75
  CHECK(B.size() == 9);    // k/30 in (0.45, 0.55) means k in {14, 15, 16}

  SUBCASE("discrete norms hit Gamma^2 * norm_w_sq within grid quadrature") {
    for (int j = 0; j < B.size(); ++j)
      CHECK(B.patch_norm_sq(j) ==
            doctest::Approx(cfg.Gamma * cfg.Gamma * B.norm_w_sq).epsilon(0.02));
  }

  SUBCASE("discrete pairings follow the autocorrelation kernel") {
    for (int a = 0; a < B.size(); ++a)
      for (int b = a + 1; b < B.size(); ++b) {
        const double dz = std::hypot(B.lattice.centers[a].x - B.lattice.centers[b].x,
                                     B.lattice.centers[a].y - B.lattice.centers[b].y);
        const double cont = cfg.Gamma * cfg.Gamma * P.cw(dz / cfg.r);
        CHECK(B.pair_fields(a, b) == doctest::Approx(cont).epsilon(1e-3).scale(
                                          cfg.Gamma * cfg.Gamma * B.norm_w_sq));
      }
  }

  SUBCASE("rescaling r leaves the sampled norm unchanged") {
    // raw profile sampling at two radii on a fine private lattice
    for (double r : {0.1, 0.2}) {
      const double R = r * P.support_radius;
      double acc = 0.0;
      const int n = 512;
      const int klo = static_cast<int>(std::ceil((0.5 - R) * n));
      const int khi = static_cast<int>(std::floor((0.5 + R) * n));
      for (int j = klo; j <= khi; ++j)
        for (int i = klo; i <= khi; ++i) {
          const Vec2 u = P.w({(static_cast<double>(i) / n - 0.5) / r,
                              (static_cast<double>(j) / n - 0.5) / r});
          acc += (u.x * u.x + u.y * u.y) / (r * r);
        }
      acc /= static_cast<double>(n) * n;
      CHECK(acc == doctest::Approx(P.norm_w_sq).epsilon(0.01));
    }
  }
}

TEST_CASE("sampled divergence obeys the first-order envelope") {
  // Centered differences of the sampled field. The core region dominates:
  // nodes land at uncontrolled offsets from the core peak, so the honest
  // bound is the first-order envelope h * max|u| / (r*eps)^2, calibrated
  // here across three resolutions (measured ratios stay below 0.5).
  const VortexConfig cfg = resolved_config();
  const VortexProfile P = build_profile(cfg, 512);
  for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
    const Grid g = build_grid(Domain::square(), h);
    const VortexBasis B = assemble_basis(g, cfg, P);
    const VectorField F = B.field(4);
    double amp = 0.0;
    for (size_t k = 0; k < F.x.size(); ++k)
      amp = std::max(amp, std::hypot(F.x[k], F.y[k]));
    double worst = 0.0;
    for (int node : g.interior_ids()) {
      const int i = node % g.nb + g.i0, j = node / g.nb + g.i0;
      if (!g.interior_ij(i - 1, j) || !g.interior_ij(i + 1, j) ||
          !g.interior_ij(i, j - 1) || !g.interior_ij(i, j + 1))
        continue;
      const double div = (F.x[g.id(i + 1, j)] - F.x[g.id(i - 1, j)] +
                          F.y[g.id(i, j + 1)] - F.y[g.id(i, j - 1)]) /
                         (2.0 * h);
      worst = std::max(worst, std::fabs(div));
    }
    const double core = cfg.r * cfg.eps;
    CHECK(worst > 0.0);
    CHECK(worst <= 1.0 * h * amp / (core * core));
  }
}

TEST_CASE("basis structure at the sweep scale") {
  const VortexConfig cfg = sweep_config();
  const VortexProfile P = build_profile(cfg, 800);
  const Grid g = build_grid(Domain::square(), 1.0 / 64);
  const VortexBasis B = assemble_basis(g, cfg, P);

  CHECK(B.size() == 159 * 159);  // k/200 in (0.1, 0.9) means k in 21..179
  CHECK(!B.core_resolved);       // h = 1/64 is far above r*eps = 3.5e-4

  SUBCASE("same-class supports are disjoint, so products vanish identically") {
    // centers (21,21) and (51,21) share class (21 mod 30, 21 mod 30)
    const int a = 0;
    int b = -1;
    for (int j = 1; j < B.size(); ++j)
      if (B.lattice.klass[j] == B.lattice.klass[a]) {
        b = j;
        break;
      }
    REQUIRE(b >= 0);
    CHECK(B.pair_fields(a, b) == 0.0);
    // bounding boxes themselves cannot touch: M/N - 2*support > 0
    const auto& pa = B.patches[a];
    const auto& pb = B.patches[b];
    const bool box_overlap = pa.i0 < pb.i0 + pb.ni && pb.i0 < pa.i0 + pa.ni &&
                             pa.j0 < pb.j0 + pb.nj && pb.j0 < pa.j0 + pa.nj;
    CHECK(!box_overlap);
  }

  SUBCASE("fields vanish off the interior and outside the layer margin") {
    for (int j = 0; j < B.size(); j += 997) {
      const auto& p = B.patches[j];
      for (int jj = 0; jj < p.nj; ++jj)
        for (int ii = 0; ii < p.ni; ++ii) {
          const size_t idx = static_cast<size_t>(jj) * p.ni + ii;
          if (p.ux[idx] == 0.0 && p.uy[idx] == 0.0) continue;
          const int node = g.id(p.i0 + ii, p.j0 + jj);
          CHECK(g.interior(node));
          CHECK(g.boundary_distance(node) >= cfg.delta - cfg.r);
        }
    }
  }

  SUBCASE("zero amplitude zeroes every field") {
    VortexConfig z = cfg;
    z.Gamma = 0.0;
    const VortexBasis Bz = assemble_basis(g, z, P);
    for (int j = 0; j < Bz.size(); j += 4999) CHECK(Bz.patch_norm_sq(j) == 0.0);
  }

  SUBCASE("inadmissible configs and mismatched profiles are rejected") {
    VortexConfig bad = cfg;
    bad.M = 20;
    CHECK_THROWS_AS(assemble_basis(g, bad, P), std::invalid_argument);
    VortexConfig other = cfg;  // admissible at N=100, but P was built at eps=1/200
    other.eps = 1.0 / 100;
    other.N = 100;
    other.r = 0.12;
    other.delta = 0.15;
    REQUIRE(validate_config(other).empty());
    CHECK_THROWS_AS(assemble_basis(g, other, P), std::invalid_argument);
  }
}
