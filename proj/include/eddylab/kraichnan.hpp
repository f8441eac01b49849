#pragma once

#include <array>
#include <string>
#include <vector>

namespace eddy {

// Homogeneous, isotropic, divergence-free shell covariance
//   Q(z) = sigma2 * k0^zeta * integral over k0 <= |k| <= k1 of
//          |k|^{-(d+zeta)} e^{i k.z} (I - k(x)k/|k|^2) dk.
// k1 may be infinite only when zeta > 0 (integrability at large k).
struct KraichnanParams {
  double sigma2 = 1.0;
  double zeta = 4.0 / 3.0;
  double k0 = 1.0;
  double k1 = 0.0;  // outer radius; pass infinity() for an unbounded shell
  int d = 2;

  static double infinity();
};

// Violated admissibility constraints, one line each; empty means valid.
std::vector<std::string> validate_params(const KraichnanParams& p);

// Dense symmetric d x d evaluation result. max_imag records the largest
// imaginary residual the quadrature discarded (exactly zero on the 2D
// closed-form angular route, tiny cancellation noise on the 3D one).
struct ShellMatrix {
  int d = 2;
  std::array<double, 9> m{};  // row-major, top-left d x d block used
  double max_imag = 0.0;

  double at(int i, int j) const { return m[static_cast<size_t>(i) * 3 + j]; }
  double& at(int i, int j) { return m[static_cast<size_t>(i) * 3 + j]; }
  double trace() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;
};

// Shell integral by radial quadrature times the angular reduction: exact
// Bessel form in d = 2, spherical product nodes in d = 3. An unbounded
// shell is truncated where the envelope tail drops below 1e-9 of the
// full-shell scale. Throws on a non-integrable combination.
ShellMatrix covariance_at(const KraichnanParams& p, const std::array<double, 3>& z);

// k0^zeta * integral over [k0, k1] of r^{-1-zeta} dr, i.e.
// (1 - (k0/k1)^zeta)/zeta with the log branch at zeta = 0. The k0 powers
// cancel exactly, which is what makes the shell bounds below k0-free.
double shell_radial_factor(double zeta, double k0, double k1);

// Surface measure of {khat : |khat . xihat| <= 1/2} on the unit sphere,
// independent of xihat by isotropy. Computed from the defining condition,
// not hardcoded.
double angular_window_measure(int d);

// (3/4) sigma2 * C' * (1 - (k0/k1)^zeta) with C' = angular window measure
// times the radial normalization: a genuine lower bound for the smallest
// eigenvalue of Q(0).
double q_lower_bound(const KraichnanParams& p);

// sigma2 * k0^{-d}: upper bound for the covariance operator norm.
double epsQ_upper_bound(const KraichnanParams& p);

// Applies the incompressibility projector I - k(x)k/|k|^2 to v without
// normalizing k, so the defect on v = k is exactly zero in floating point.
std::array<double, 3> project_divfree(const std::array<double, 3>& k,
                                      const std::array<double, 3>& v, int d);

enum class KraichnanRegime { UVcascade, IRcascade };

struct RegimeReport {
  KraichnanRegime regime = KraichnanRegime::UVcascade;
  double q_lower = 0.0;
  double epsQ_upper = 0.0;
  bool q_large = false;             // q_lower >= q_threshold
  bool epsQ_small = false;          // epsQ_upper <= eps_threshold
  bool conditions_met = false;      // both of the above
  bool enstrophy_boundary = false;  // zeta == 0 in d = 2
  bool white_in_space = false;      // zeta == -d
};

// Classifies the spectral regime (UVcascade for zeta > 0, IRcascade for
// -d <= zeta <= 0) and evaluates both bounds against the supplied
// thresholds. Throws for zeta < -d.
RegimeReport regime_report(const KraichnanParams& p, double q_threshold,
                           double eps_threshold);

// Finite Fourier-lattice cross-check: on the integer lattice the covariance
// operator diagonalizes mode by mode with multiplier
// sigma2 * k0^zeta * |k|^{-(d+zeta)} on I - k(x)k/|k|^2, so its top
// eigenvalue is explicit. Shell radii snap to realized lattice radii
// (inward from both ends); the snapping is reported, not hidden.
struct TorusShellCheck {
  double snapped_k0 = 0.0;  // smallest lattice |k| >= k0 inside the box
  double snapped_k1 = 0.0;  // largest lattice |k| <= min(k1, box diagonal)
  long mode_count = 0;      // lattice modes in the snapped shell
  double top_multiplier = 0.0;
  double top_mode_norm = 0.0;  // |k| attaining the top multiplier
};

// Scans modes k in [-kmax_box, kmax_box]^d. An empty snapped shell yields
// mode_count = 0 and zero multiplier.
TorusShellCheck torus_shell_check(const KraichnanParams& p, int kmax_box);

}  // namespace eddy
