#include "eddylab/kraichnan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eddylab/linalg.hpp"

namespace eddy {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool unbounded(double k1) { return std::isinf(k1); }

void require_integrable(const KraichnanParams& p) {
  if (unbounded(p.k1) && p.zeta <= 0.0)
    throw std::invalid_argument(
        "non-integrable shell: zeta <= 0 requires a finite outer radius k1");
  if (!(p.k0 > 0.0)) throw std::invalid_argument("k0 must be positive");
  if (p.d != 2 && p.d != 3)
    throw std::invalid_argument("only d = 2 and d = 3 are evaluated");
}

// Truncation radius for an unbounded shell: past R the envelope tail
//   k0^zeta * int_R^inf r^{-1-zeta} env(r |z|) dr
// is below 1e-9 of the full radial factor. env uses the |J| <= 1 bound
// near the origin and the 1/sqrt oscillatory decay beyond it.
double truncation_radius(const KraichnanParams& p, double zmag) {
  const double scale = 1e-9 / p.zeta;  // full factor is 1/zeta at k1 = inf
  double R = p.k0 * std::pow(p.zeta * scale, -1.0 / p.zeta);
  if (zmag > 0.0) {
    const double c = std::pow(p.k0, p.zeta) * 1.1 * std::sqrt(2.0 / (kPi * zmag));
    const double Rosc = std::pow(c / ((0.5 + p.zeta) * scale), 1.0 / (0.5 + p.zeta));
    R = std::min(R, std::max(Rosc, 2.0 / zmag));
  }
  return std::max(R, 2.0 * p.k0);
}

// Radial panels: geometric growth to track the power law, capped at a
// quarter oscillation period when the phase r|z| advances.
template <class F>
void radial_quadrature(double a, double b, double zmag, F&& per_node) {
  static const GaussRule g = gauss_legendre_rule(16);
  double r = a;
  while (r < b) {
    double step = 0.25 * r;
    if (zmag > 0.0) step = std::min(step, 0.5 * kPi / zmag);
    step = std::min(step, b - r);
    const double mid = r + 0.5 * step, half = 0.5 * step;
    for (size_t i = 0; i < g.x.size(); ++i) per_node(mid + half * g.x[i], half * g.w[i]);
    r += step;
  }
}

ShellMatrix evaluate_2d(const KraichnanParams& p, double zx, double zy) {
  const double zmag = std::hypot(zx, zy);
  const double kup = unbounded(p.k1) ? truncation_radius(p, zmag) : p.k1;

  // closed-form angular reduction: the circle integral of
  // e^{i a cos t}(I - khat(x)khat) splits along zhat and its perp with
  // coefficients pi (J0 + J2) and pi (J0 - J2); the imaginary part cancels
  // under t -> -t exactly.
  double i0 = 0.0, i2 = 0.0;
  radial_quadrature(p.k0, kup, zmag, [&](double r, double w) {
    const double amp = w * std::pow(r, -1.0 - p.zeta);
    const double a = r * zmag;
    i0 += amp * std::cyl_bessel_j(0, a);
    i2 += amp * std::cyl_bessel_j(2, a);
  });

  double ex = 1.0, ey = 0.0;
  if (zmag > 0.0) {
    ex = zx / zmag;
    ey = zy / zmag;
  }
  const double pref = p.sigma2 * std::pow(p.k0, p.zeta) * kPi;
  const double along = pref * (i0 + i2), across = pref * (i0 - i2);

  ShellMatrix q;
  q.d = 2;
  q.at(0, 0) = along * ex * ex + across * ey * ey;
  q.at(0, 1) = q.at(1, 0) = (along - across) * ex * ey;
  q.at(1, 1) = along * ey * ey + across * ex * ex;
  q.max_imag = 0.0;
  return q;
}

ShellMatrix evaluate_3d(const KraichnanParams& p, const std::array<double, 3>& z) {
  const double zmag = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
  const double kup = unbounded(p.k1) ? truncation_radius(p, zmag) : p.k1;

  // spherical product nodes: Gauss-Legendre in the polar cosine, uniform
  // azimuth. Directions come in antipodal pairs with equal weights, so the
  // odd (imaginary) part cancels to rounding noise, which is tracked.
  static const GaussRule gu = gauss_legendre_rule(24);
  const int nth = 48;
  struct Dir {
    double k[3], w;
  };
  std::vector<Dir> dirs;
  dirs.reserve(gu.x.size() * nth);
  for (size_t iu = 0; iu < gu.x.size(); ++iu) {
    const double u = gu.x[iu], s = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (int j = 0; j < nth; ++j) {
      const double th = 2.0 * kPi * j / nth;
      dirs.push_back({{s * std::cos(th), s * std::sin(th), u},
                      gu.w[iu] * (2.0 * kPi / nth)});
    }
  }

  double re[9] = {0.0}, im_max = 0.0;
  double im[9] = {0.0};
  radial_quadrature(p.k0, kup, zmag, [&](double r, double w) {
    const double amp = w * std::pow(r, -1.0 - p.zeta);
    for (const Dir& dd : dirs) {
      const double phase = r * (dd.k[0] * z[0] + dd.k[1] * z[1] + dd.k[2] * z[2]);
      const double cw = amp * dd.w * std::cos(phase);
      const double sw = amp * dd.w * std::sin(phase);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double proj = (i == j ? 1.0 : 0.0) - dd.k[i] * dd.k[j];
          re[i * 3 + j] += cw * proj;
          im[i * 3 + j] += sw * proj;
        }
    }
  });

  const double pref = p.sigma2 * std::pow(p.k0, p.zeta);
  ShellMatrix q;
  q.d = 3;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      q.at(i, j) = pref * 0.5 * (re[i * 3 + j] + re[j * 3 + i]);
      im_max = std::max(im_max, std::fabs(pref * im[i * 3 + j]));
    }
  q.max_imag = im_max;
  const double scale = std::fabs(q.trace()) + 1e-300;
  if (im_max > 1e-10 * scale)
    throw std::runtime_error("imaginary residual of the shell quadrature too large");
  return q;
}

}  // namespace

double KraichnanParams::infinity() { return std::numeric_limits<double>::infinity(); }

std::vector<std::string> validate_params(const KraichnanParams& p) {
  std::vector<std::string> bad;
  if (!(p.sigma2 > 0.0)) bad.push_back("sigma2 must be positive");
  if (!(p.k0 > 0.0)) bad.push_back("k0 must be positive");
  if (!(p.k0 < p.k1)) bad.push_back("shell radii must satisfy k0 < k1");
  if (p.zeta <= 0.0 && unbounded(p.k1))
    bad.push_back("zeta <= 0 requires a finite k1 (integrability at large k)");
  if (p.d < 2) bad.push_back("dimension d must be at least 2");
  if (p.d > 3) bad.push_back("dimension d above 3 is not evaluated");
  return bad;
}

double ShellMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < d; ++i) t += at(i, i);
  return t;
}

double ShellMatrix::min_eigenvalue() const {
  if (d == 2) {
    const double m = 0.5 * (at(0, 0) + at(1, 1));
    const double h = 0.5 * (at(0, 0) - at(1, 1));
    return m - std::sqrt(h * h + at(0, 1) * at(0, 1));
  }
  std::vector<double> a(static_cast<size_t>(d) * d), ev, evec;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[static_cast<size_t>(i) * d + j] = at(i, j);
  dense_symmetric_eig(a, d, ev, evec);
  return ev.front();
}

double ShellMatrix::max_eigenvalue() const {
  if (d == 2) {
    const double m = 0.5 * (at(0, 0) + at(1, 1));
    const double h = 0.5 * (at(0, 0) - at(1, 1));
    return m + std::sqrt(h * h + at(0, 1) * at(0, 1));
  }
  std::vector<double> a(static_cast<size_t>(d) * d), ev, evec;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[static_cast<size_t>(i) * d + j] = at(i, j);
  dense_symmetric_eig(a, d, ev, evec);
  return ev.back();
}

ShellMatrix covariance_at(const KraichnanParams& p, const std::array<double, 3>& z) {
  require_integrable(p);
  if (!(p.k1 >= p.k0)) throw std::invalid_argument("outer radius below inner radius");
  if (p.d == 2) {
    if (z[2] != 0.0)
      throw std::invalid_argument("third coordinate must vanish when d = 2");
    return evaluate_2d(p, z[0], z[1]);
  }
  return evaluate_3d(p, z);
}

double shell_radial_factor(double zeta, double k0, double k1) {
  if (!(k0 > 0.0) || !(k1 >= k0))
    throw std::invalid_argument("shell radii must satisfy 0 < k0 <= k1");
  if (unbounded(k1) && zeta <= 0.0)
    throw std::invalid_argument(
        "non-integrable shell: zeta <= 0 requires a finite outer radius k1");
  if (zeta == 0.0) return std::log(k1 / k0);
  return (1.0 - std::pow(k0 / k1, zeta)) / zeta;
}

double angular_window_measure(int d) {
  if (d == 2) return 2.0 * (std::acos(-0.5) - std::acos(0.5));  // two arcs
  if (d == 3) return 2.0 * kPi * (0.5 - (-0.5));  // uniform polar cosine band
  throw std::invalid_argument("only d = 2 and d = 3 are evaluated");
}

double q_lower_bound(const KraichnanParams& p) {
  return 0.75 * p.sigma2 * angular_window_measure(p.d) *
         shell_radial_factor(p.zeta, p.k0, p.k1);
}

double epsQ_upper_bound(const KraichnanParams& p) {
  return p.sigma2 * std::pow(p.k0, -p.d);
}

std::array<double, 3> project_divfree(const std::array<double, 3>& k,
                                      const std::array<double, 3>& v, int d) {
  double kk = 0.0, kv = 0.0;
  for (int i = 0; i < d; ++i) {
    kk += k[i] * k[i];
    kv += k[i] * v[i];
  }
  std::array<double, 3> out{};
  const double c = kv / kk;  // exactly 1 when v = k, so the defect is 0
  for (int i = 0; i < d; ++i) out[i] = v[i] - k[i] * c;
  return out;
}

RegimeReport regime_report(const KraichnanParams& p, double q_threshold,
                           double eps_threshold) {
  if (p.zeta < -static_cast<double>(p.d))
    throw std::invalid_argument("zeta below -d: rougher than white in space");
  RegimeReport rep;
  rep.regime = p.zeta > 0.0 ? KraichnanRegime::UVcascade : KraichnanRegime::IRcascade;
  rep.q_lower = q_lower_bound(p);
  rep.epsQ_upper = epsQ_upper_bound(p);
  rep.q_large = rep.q_lower >= q_threshold;
  rep.epsQ_small = rep.epsQ_upper <= eps_threshold;
  rep.conditions_met = rep.q_large && rep.epsQ_small;
  rep.enstrophy_boundary = p.zeta == 0.0 && p.d == 2;
  rep.white_in_space = p.zeta == -static_cast<double>(p.d);
  return rep;
}

TorusShellCheck torus_shell_check(const KraichnanParams& p, int kmax_box) {
  require_integrable(p);
  TorusShellCheck chk;
  const double lo2 = p.k0 * p.k0;
  const double hi2 = unbounded(p.k1) ? std::numeric_limits<double>::infinity()
                                     : p.k1 * p.k1;
  long best_n2 = -1;
  auto visit = [&](long n2) {
    const double fn2 = static_cast<double>(n2);
    if (fn2 < lo2 || fn2 > hi2) return;
    ++chk.mode_count;
    if (chk.snapped_k0 == 0.0 || fn2 < chk.snapped_k0 * chk.snapped_k0)
      chk.snapped_k0 = std::sqrt(fn2);
    if (fn2 > chk.snapped_k1 * chk.snapped_k1) chk.snapped_k1 = std::sqrt(fn2);
    const double mult = p.sigma2 * std::pow(p.k0, p.zeta) *
                        std::pow(fn2, -0.5 * (p.d + p.zeta));
    if (mult > chk.top_multiplier) {
      chk.top_multiplier = mult;
      best_n2 = n2;
    }
  };
  if (p.d == 2) {
    for (long kx = -kmax_box; kx <= kmax_box; ++kx)
      for (long ky = -kmax_box; ky <= kmax_box; ++ky) {
        if (kx == 0 && ky == 0) continue;
        visit(kx * kx + ky * ky);
      }
  } else {
    for (long kx = -kmax_box; kx <= kmax_box; ++kx)
      for (long ky = -kmax_box; ky <= kmax_box; ++ky)
        for (long kz = -kmax_box; kz <= kmax_box; ++kz) {
          if (kx == 0 && ky == 0 && kz == 0) continue;
          visit(kx * kx + ky * ky + kz * kz);
        }
  }
  if (best_n2 >= 0) chk.top_mode_norm = std::sqrt(static_cast<double>(best_n2));
  return chk;
}

}  // namespace eddy
